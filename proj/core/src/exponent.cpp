#include "hmq/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hmq/likelihood.hpp"
#include "hmq/numerics.hpp"
#include "hmq/parallel.hpp"
#include "hmq/rng.hpp"

namespace hmq {

namespace {

ExponentEstimate summarize(const std::vector<double>& per_path) {
  ExponentEstimate est;
  est.n_samples = static_cast<long>(per_path.size());
  est.value = mean_of(per_path);
  est.std_error = per_path.size() > 1
                      ? stdev_of(per_path) / std::sqrt(static_cast<double>(per_path.size()))
                      : 0.0;
  return est;
}

void check_mc_args(int path_len, int n_paths) {
  if (path_len < 100) throw std::invalid_argument("estimate: path_len must be >= 100");
  if (n_paths < 1) throw std::invalid_argument("estimate: n_paths must be >= 1");
}

std::vector<int> quantize_path(const Quantizer& q, const std::vector<double>& y) {
  std::vector<int> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = quantize(q, y[i]);
  return z;
}

}  // namespace

ExponentEstimate estimate_K(const ModelParams& params, int path_len, int n_paths,
                            std::uint64_t seed, int workers) {
  params.validate();
  check_mc_args(path_len, n_paths);
  std::vector<double> vals(static_cast<std::size_t>(n_paths));
  parallel_for(n_paths, workers, [&](long i) {
    const PathSample path = sample_path(params, Hypothesis::H0, path_len,
                                        derive_seed(seed, static_cast<std::uint64_t>(i)));
    vals[static_cast<std::size_t>(i)] = llr(path.observations, params);
  });
  return summarize(vals);
}

ExponentEstimate estimate_KN(const Quantizer& q, const ModelParams& params,
                             const StateGrid& grid, int path_len, int n_paths,
                             std::uint64_t seed, int workers) {
  params.validate();
  check_mc_args(path_len, n_paths);
  const QuantizedKernel kernel = build_kernel(q, params, grid);
  std::vector<double> vals(static_cast<std::size_t>(n_paths));
  parallel_for(n_paths, workers, [&](long i) {
    const PathSample path = sample_path(params, Hypothesis::H0, path_len,
                                        derive_seed(seed, static_cast<std::uint64_t>(i)));
    const std::vector<int> z = quantize_path(q, path.observations);
    vals[static_cast<std::size_t>(i)] = llr_quantized(z, q, kernel, grid, params);
  });
  return summarize(vals);
}

FTable estimate_F(const ModelParams& params, int path_len, int n_paths,
                  int window_m, int window_k, double bandwidth,
                  std::span<const double> eval_grid, std::uint64_t seed,
                  int workers) {
  params.validate();
  check_mc_args(path_len, n_paths);
  if (window_m < 1 || window_k < 1)
    throw std::invalid_argument("estimate_F: window extents must be >= 1");
  const int g = static_cast<int>(eval_grid.size());
  if (g < 3) throw std::invalid_argument("estimate_F: eval grid too small");
  const double lo = eval_grid.front(), hi = eval_grid.back();
  const double bin_h = (hi - lo) / (g - 1);
  const int margin = std::max(window_m, window_k);
  if (path_len < 2 * margin + 2)
    throw std::invalid_argument("estimate_F: path_len too short for the window");

  const ScoreWeights weights(window_m, window_k, params);
  const int wsize = weights.window_size();

  // Per-replicate bin partials, merged in replicate order so the result does
  // not depend on the worker count.
  struct Partial {
    std::vector<double> s2, cnt;
    double sum_y = 0.0, sum_y2 = 0.0;
    long n_anchors = 0;
  };
  std::vector<Partial> partials(static_cast<std::size_t>(n_paths));
  parallel_for(n_paths, workers, [&](long i) {
    Partial& p = partials[static_cast<std::size_t>(i)];
    p.s2.assign(static_cast<std::size_t>(g), 0.0);
    p.cnt.assign(static_cast<std::size_t>(g), 0.0);
    const PathSample path = sample_path(params, Hypothesis::H0, path_len,
                                        derive_seed(seed, static_cast<std::uint64_t>(i)));
    const std::vector<double>& y = path.observations;
    KahanSum sy, sy2;
    for (int t = margin; t + margin < static_cast<int>(y.size()); ++t) {
      const double yt = y[static_cast<std::size_t>(t)];
      const std::span<const double> window(&y[static_cast<std::size_t>(t - window_m)],
                                           static_cast<std::size_t>(wsize));
      const double sc = weights.score(window);
      const long b = std::lround((yt - lo) / bin_h);
      if (b < 0 || b >= g) continue;  // outside the evaluation range
      p.s2[static_cast<std::size_t>(b)] += sc * sc;
      p.cnt[static_cast<std::size_t>(b)] += 1.0;
      sy.add(yt);
      sy2.add(yt * yt);
      ++p.n_anchors;
    }
    p.sum_y = sy.value();
    p.sum_y2 = sy2.value();
  });

  std::vector<double> s2(static_cast<std::size_t>(g), 0.0);
  std::vector<double> cnt(static_cast<std::size_t>(g), 0.0);
  double sum_y = 0.0, sum_y2 = 0.0;
  long n_anchors = 0;
  for (const Partial& p : partials) {
    for (int b = 0; b < g; ++b) {
      s2[static_cast<std::size_t>(b)] += p.s2[static_cast<std::size_t>(b)];
      cnt[static_cast<std::size_t>(b)] += p.cnt[static_cast<std::size_t>(b)];
    }
    sum_y += p.sum_y;
    sum_y2 += p.sum_y2;
    n_anchors += p.n_anchors;
  }
  if (n_anchors < 2) throw std::runtime_error("estimate_F: no usable anchors");

  double bw = bandwidth;
  if (!(bw > 0.0)) {
    const double mean = sum_y / static_cast<double>(n_anchors);
    const double var =
        std::max(0.0, sum_y2 / static_cast<double>(n_anchors) - mean * mean);
    bw = 0.25 * std::sqrt(var) * std::pow(static_cast<double>(n_anchors), -0.2);
    if (!(bw > 0.0)) throw std::runtime_error("estimate_F: degenerate bandwidth");
  }

  FTable table;
  table.grid.assign(eval_grid.begin(), eval_grid.end());
  table.values.assign(static_cast<std::size_t>(g), 0.0);
  table.counts.assign(static_cast<std::size_t>(g), 0);
  const int reach = std::max(1, static_cast<int>(std::ceil(6.0 * bw / bin_h)));
  std::vector<char> populated(static_cast<std::size_t>(g), 0);
  parallel_for(g, workers, [&](long e) {
    const int b0 = std::max(0, static_cast<int>(e) - reach);
    const int b1 = std::min(g - 1, static_cast<int>(e) + reach);
    double num = 0.0, den = 0.0, near = 0.0;
    for (int b = b0; b <= b1; ++b) {
      const double u = (eval_grid[static_cast<std::size_t>(e)] -
                        eval_grid[static_cast<std::size_t>(b)]) /
                       bw;
      const double w = std::exp(-0.5 * u * u);
      num += w * s2[static_cast<std::size_t>(b)];
      den += w * cnt[static_cast<std::size_t>(b)];
      if (std::abs(u) <= 3.0) near += cnt[static_cast<std::size_t>(b)];
    }
    if (den > 0.0 && near >= 1.0) {
      table.values[static_cast<std::size_t>(e)] = num / den;
      table.counts[static_cast<std::size_t>(e)] = std::lround(near);
      populated[static_cast<std::size_t>(e)] = 1;
    }
  });

  // Flat extrapolation from the nearest populated point for empty tails.
  int first = -1, last = -1;
  for (int e = 0; e < g; ++e)
    if (populated[static_cast<std::size_t>(e)]) {
      if (first < 0) first = e;
      last = e;
    }
  if (first < 0) throw std::runtime_error("estimate_F: no populated evaluation points");
  for (int e = 0; e < first; ++e)
    table.values[static_cast<std::size_t>(e)] = table.values[static_cast<std::size_t>(first)];
  for (int e = last + 1; e < g; ++e)
    table.values[static_cast<std::size_t>(e)] = table.values[static_cast<std::size_t>(last)];
  for (int e = first; e <= last; ++e)
    if (!populated[static_cast<std::size_t>(e)]) {
      // interior hole: copy the nearer populated neighbor
      int left = e, right = e;
      while (left > first && !populated[static_cast<std::size_t>(left)]) --left;
      while (right < last && !populated[static_cast<std::size_t>(right)]) ++right;
      const int src = (e - left <= right - e) ? left : right;
      table.values[static_cast<std::size_t>(e)] = table.values[static_cast<std::size_t>(src)];
    }
  return table;
}

namespace {

// Simpson sum of scale * p0 F / zeta^2 on every `stride`-th grid point.
double d_integrand_simpson(const PointDensity& zeta, const FTable& f,
                           std::span<const double> p0_values, int stride,
                           double scale = 1.0) {
  const int g = static_cast<int>(zeta.grid.size());
  const int pts = (g - 1) / stride + 1;
  std::vector<double> w(static_cast<std::size_t>(pts));
  for (int i = 0; i < pts; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i) * stride;
    const double pf = scale * p0_values[idx] * f.values[idx];
    const double z = zeta.values[idx];
    if (z > 0.0)
      w[static_cast<std::size_t>(i)] = pf / (z * z);
    else
      w[static_cast<std::size_t>(i)] =
          pf > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  const double h = (zeta.grid.back() - zeta.grid.front()) / (pts - 1);
  return simpson(w, h);
}

void check_common_grid(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("exponent: tables on different grids");
}

}  // namespace

DResult compute_D(const PointDensity& zeta, const FTable& f,
                  std::span<const double> p0_values) {
  check_common_grid(zeta.grid, f.grid);
  check_common_grid(zeta.grid, p0_values);
  const int g = static_cast<int>(zeta.grid.size());
  if (g < 5 || (g - 1) % 4 != 0)
    throw std::invalid_argument("compute_D: grid size must be 4k+1 with k >= 1");
  for (std::size_t i = 0; i < zeta.grid.size(); ++i)
    if (std::abs(zeta.grid[i] - f.grid[i]) > 1e-12)
      throw std::invalid_argument("compute_D: density and F tables use different grids");

  const double s4 = d_integrand_simpson(zeta, f, p0_values, 4);
  const double s2 = d_integrand_simpson(zeta, f, p0_values, 2);
  const double s1 = d_integrand_simpson(zeta, f, p0_values, 1);
  DResult out;
  if (!std::isfinite(s4) || !std::isfinite(s2) || !std::isfinite(s1) ||
      s2 > 1.1 * s4 || s1 > 1.1 * s2) {
    out.divergent = true;
    return out;
  }
  out.value = s1 / 24.0;

  // Normalized-measure evaluation (p0 and the measure both rescaled by the
  // support width) must agree: the width factors cancel analytically.
  const double width = zeta.grid.back() - zeta.grid.front();
  const double normalized = d_integrand_simpson(zeta, f, p0_values, 1, width) / width / 24.0;
  if (std::abs(normalized - out.value) > 1e-10 * std::max(1.0, std::abs(out.value)))
    throw std::runtime_error("compute_D: convention mismatch");
  return out;
}

double lower_bound_D(const FTable& f, std::span<const double> p0_values) {
  check_common_grid(f.grid, p0_values);
  const int g = static_cast<int>(f.grid.size());
  if (g < 3 || g % 2 == 0)
    throw std::invalid_argument("lower_bound_D: need an odd grid size");
  const double width = f.grid.back() - f.grid.front();
  std::vector<double> cbrt_leb(static_cast<std::size_t>(g));
  std::vector<double> cbrt_norm(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    const double pf = p0_values[static_cast<std::size_t>(i)] *
                      f.values[static_cast<std::size_t>(i)];
    if (!(pf >= 0.0)) throw std::invalid_argument("lower_bound_D: negative p0*F");
    cbrt_leb[static_cast<std::size_t>(i)] = std::cbrt(pf);
    cbrt_norm[static_cast<std::size_t>(i)] = std::cbrt(width * pf);
  }
  const double h = width / (g - 1);
  const double integral = simpson(cbrt_leb, h);
  const double lebesgue = integral * integral * integral / 24.0;
  // Same bound, normalized-measure form: (width^2/24) (integral dmu)^3 with
  // mu the uniform probability measure on the support; must agree.
  const double i_norm = simpson(cbrt_norm, h) / width;
  const double normalized = width * width * i_norm * i_norm * i_norm / 24.0;
  if (std::abs(normalized - lebesgue) > 1e-10 * std::max(1.0, std::abs(lebesgue)))
    throw std::runtime_error("lower_bound_D: convention mismatch");
  return lebesgue;
}

std::vector<SweepRow> convergence_sweep(const ModelParams& params,
                                        const StateGrid& grid,
                                        const PointDensity& density,
                                        std::span<const int> n_list, int path_len,
                                        int n_paths, std::uint64_t seed,
                                        int workers) {
  if (n_list.empty()) throw std::invalid_argument("convergence_sweep: empty N list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2) throw std::invalid_argument("convergence_sweep: N must be >= 2");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("convergence_sweep: N list must be increasing");
  }
  const ExponentEstimate k = estimate_K(params, path_len, n_paths, seed, workers);
  std::vector<SweepRow> rows;
  rows.reserve(n_list.size());
  for (const int n : n_list) {
    const Quantizer q = build_quantizer(density, n);
    const ExponentEstimate kn =
        estimate_KN(q, params, grid, path_len, n_paths, seed, workers);
    SweepRow row;
    row.n_cells = n;
    row.k_hat = k.value;
    row.k_se = k.std_error;
    row.kn_hat = kn.value;
    row.kn_se = kn.std_error;
    row.scaled_gap = static_cast<double>(n) * static_cast<double>(n) * (k.value - kn.value);
    rows.push_back(row);
  }
  return rows;
}

double iid_exponent(const ModelParams& params) {
  params.validate();
  const double v0 = params.sigma * params.sigma;
  const double v1 = 1.0 + v0;
  return 0.5 * (std::log(v1 / v0) + v0 / v1 - 1.0);
}

double iid_quantized_exponent(const Quantizer& q, const ModelParams& params) {
  params.validate();
  if (params.a != 0.0)
    throw std::invalid_argument("iid_quantized_exponent: closed form requires a = 0");
  const std::vector<double> p0 = h0_cell_masses(q, params);
  ModelParams marginal = params;
  marginal.sigma = std::sqrt(1.0 + params.sigma * params.sigma);
  const std::vector<double> p1 = h0_cell_masses(q, marginal);
  KahanSum kl;
  for (std::size_t j = 0; j < p0.size(); ++j) {
    if (p0[j] == 0.0) continue;  // zero-mass cells contribute nothing
    kl.add(p0[j] * std::log(p0[j] / p1[j]));
  }
  return kl.value();
}

}  // namespace hmq
