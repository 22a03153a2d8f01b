#include "hmq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "hmq/numerics.hpp"

namespace hmq {

namespace {

void check_density(const PointDensity& d) {
  if (d.grid.size() != d.values.size() || d.grid.size() < 2)
    throw std::invalid_argument("PointDensity: grid/values size mismatch");
  for (std::size_t i = 1; i < d.grid.size(); ++i)
    if (!(d.grid[i] > d.grid[i - 1]))
      throw std::invalid_argument("PointDensity: grid not strictly increasing");
  for (double v : d.values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("PointDensity: values must be finite and >= 0");
}

// Cumulative trapezoid integral of the density table (possibly nonuniform grid).
std::vector<double> cumulative(const PointDensity& d) {
  std::vector<double> c(d.grid.size());
  KahanSum s;
  c[0] = 0.0;
  for (std::size_t i = 1; i < d.grid.size(); ++i) {
    s.add(0.5 * (d.values[i] + d.values[i - 1]) * (d.grid[i] - d.grid[i - 1]));
    c[i] = s.value();
  }
  return c;
}

void normalize(PointDensity& d) {
  const double total = cumulative(d).back();
  if (!(total > 0.0)) throw std::invalid_argument("point density integrates to zero");
  for (double& v : d.values) v /= total;
}

}  // namespace

Quantizer Quantizer::from_boundaries(std::vector<double> edges) {
  if (edges.size() < 2) throw std::invalid_argument("Quantizer: need at least 2 edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw std::invalid_argument("Quantizer: boundaries must be strictly increasing");
  Quantizer q;
  q.boundaries = std::move(edges);
  const std::size_t n = q.boundaries.size() - 1;
  q.reps.resize(n);
  q.lengths.resize(n);
  q.specific_density.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    q.lengths[j] = q.boundaries[j + 1] - q.boundaries[j];
    q.reps[j] = 0.5 * (q.boundaries[j] + q.boundaries[j + 1]);
    q.specific_density[j] = 1.0 / (static_cast<double>(n) * q.lengths[j]);
  }
  return q;
}

PointDensity density_uniform(double y_lo, double y_hi, int grid_size) {
  if (!(y_lo < y_hi)) throw std::invalid_argument("density_uniform: empty support");
  PointDensity d;
  d.grid = linspace(y_lo, y_hi, grid_size);
  d.values.assign(d.grid.size(), 1.0 / (y_hi - y_lo));
  return d;
}

PointDensity density_iid(const ModelParams& params, int grid_size) {
  params.validate();
  PointDensity d;
  d.grid = linspace(params.y_lo, params.y_hi, grid_size);
  d.values.resize(d.grid.size());
  const double s2 = params.sigma * params.sigma;
  const double denom = s2 * (1.0 + s2);
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    const double y = d.grid[i];
    const double f_iid = (y / denom) * (y / denom);
    d.values[i] = std::cbrt(normal_pdf(y, params.sigma) * f_iid);
  }
  normalize(d);
  return d;
}

PointDensity density_optimal(std::span<const double> grid,
                             std::span<const double> f_values,
                             std::span<const double> p0_values) {
  if (grid.size() != f_values.size() || grid.size() != p0_values.size())
    throw std::invalid_argument("density_optimal: table size mismatch");
  PointDensity d;
  d.grid.assign(grid.begin(), grid.end());
  d.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(f_values[i] >= 0.0) || !(p0_values[i] >= 0.0))
      throw std::invalid_argument("density_optimal: negative table entry");
    d.values[i] = std::cbrt(p0_values[i] * f_values[i]);
  }
  check_density(d);
  normalize(d);
  return d;
}

Quantizer build_quantizer(const PointDensity& density, int n_cells) {
  check_density(density);
  if (n_cells < 1) throw std::invalid_argument("build_quantizer: need n_cells >= 1");
  const std::vector<double> cum = cumulative(density);
  const double total = cum.back();
  if (!(total > 0.0)) throw std::invalid_argument("build_quantizer: zero-mass density");

  std::vector<double> edges(static_cast<std::size_t>(n_cells) + 1);
  edges.front() = density.grid.front();
  edges.back() = density.grid.back();
  for (int j = 1; j < n_cells; ++j) {
    const double t = total * static_cast<double>(j) / n_cells;
    const auto it = std::upper_bound(cum.begin(), cum.end(), t);
    if (it == cum.end())
      throw std::runtime_error("build_quantizer: quantile beyond cumulative range");
    const std::size_t hi = static_cast<std::size_t>(it - cum.begin());
    // A zero-density plateau whose cumulative value equals the target has no
    // unique quantile.
    if (hi >= 2 && cum[hi - 1] == t && cum[hi - 2] == t)
      throw std::runtime_error("build_quantizer: ambiguous boundary (zero-density plateau at a quantile)");
    const double seg = cum[hi] - cum[hi - 1];
    double frac = (t - cum[hi - 1]) / seg;
    // Snap to the grid node when the target sits within rounding noise of a
    // segment end, so symmetric inputs produce exact symmetric boundaries.
    if (frac < 1e-9) frac = 0.0;
    if (frac > 1.0 - 1e-9) frac = 1.0;
    edges[static_cast<std::size_t>(j)] =
        density.grid[hi - 1] + frac * (density.grid[hi] - density.grid[hi - 1]);
  }
  for (std::size_t j = 1; j < edges.size(); ++j)
    if (!(edges[j] > edges[j - 1]))
      throw std::runtime_error("build_quantizer: degenerate cell (grid too coarse for N)");
  return Quantizer::from_boundaries(std::move(edges));
}

int quantize(const Quantizer& q, double y) {
  if (std::isnan(y)) throw std::invalid_argument("quantize: NaN observation");
  const auto first = q.boundaries.begin() + 1;
  const auto last = q.boundaries.end() - 1;
  return static_cast<int>(std::upper_bound(first, last, y) - first);
}

std::string to_json(const Quantizer& q) {
  nlohmann::json j;
  j["support"] = {q.support_lo(), q.support_hi()};
  j["boundaries"] = q.boundaries;
  j["reps"] = q.reps;
  return j.dump();
}

std::string to_json(const PointDensity& d) {
  nlohmann::json j;
  j["grid"] = d.grid;
  j["values"] = d.values;
  return j.dump();
}

Quantizer quantizer_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Quantizer q = Quantizer::from_boundaries(j.at("boundaries").get<std::vector<double>>());
  if (j.contains("reps")) {
    const auto reps = j.at("reps").get<std::vector<double>>();
    if (reps.size() != q.reps.size())
      throw std::invalid_argument("quantizer_from_json: reps/cells mismatch");
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (!(reps[i] > q.boundaries[i] && reps[i] < q.boundaries[i + 1]))
        throw std::invalid_argument("quantizer_from_json: rep outside its cell");
    q.reps = reps;
  }
  return q;
}

PointDensity density_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PointDensity d;
  d.grid = j.at("grid").get<std::vector<double>>();
  d.values = j.at("values").get<std::vector<double>>();
  check_density(d);
  return d;
}

}  // namespace hmq
