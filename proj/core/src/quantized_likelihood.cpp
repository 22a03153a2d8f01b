#include "hmq/quantized_likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hmq/numerics.hpp"

namespace hmq {

namespace {

void check_symbols(std::span<const int> z, int n_cells) {
  if (z.empty()) throw std::invalid_argument("quantized likelihood: empty symbol sequence");
  for (int s : z)
    if (s < 0 || s >= n_cells)
      throw std::invalid_argument("quantized likelihood: symbol out of range");
}

// Forward filter over cell masses only (no reference-measure term).
double mass_loglik_h1(std::span<const int> z, const QuantizedKernel& kernel,
                      const StateGrid& grid) {
  DiscreteFilterState st{grid.stationary, 0.0};
  for (int s : z) st = discrete_filter_step(st, s, kernel, grid);
  return st.loglik_accum;
}

double mass_loglik_h0(std::span<const int> z, const std::vector<double>& p0,
                      int n_cells) {
  check_symbols(z, n_cells);
  KahanSum acc;
  for (int s : z) acc.add(std::log(p0[static_cast<std::size_t>(s)]));
  return acc.value();
}

double reference_correction(std::span<const int> z, const std::vector<double>& lengths,
                            double width) {
  KahanSum acc;
  for (int s : z) acc.add(std::log(width / lengths[static_cast<std::size_t>(s)]));
  return acc.value();
}

}  // namespace

QuantizedKernel build_kernel(const Quantizer& q, const ModelParams& params,
                             const StateGrid& grid) {
  params.validate();
  const int m = static_cast<int>(grid.nodes.size());
  const int n = q.cells();
  QuantizedKernel kernel;
  kernel.g_matrix.resize(m, n);
  kernel.g_density.resize(m, n);
  kernel.lengths = q.lengths;
  kernel.support_width = q.support_hi() - q.support_lo();
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double x = grid.nodes[i];
    for (int j = 0; j < n; ++j) {
      const double lo = (j == 0) ? -inf : q.boundaries[static_cast<std::size_t>(j)] - x;
      const double hi = (j == n - 1) ? inf : q.boundaries[static_cast<std::size_t>(j) + 1] - x;
      const double mass = normal_interval_mass(lo, hi, params.sigma);
      kernel.g_matrix(i, j) = mass;
      kernel.g_density(i, j) = mass / q.lengths[static_cast<std::size_t>(j)];
    }
  }
  return kernel;
}

DiscreteFilterState discrete_filter_step(const DiscreteFilterState& st, int z,
                                         const QuantizedKernel& kernel,
                                         const StateGrid& grid) {
  if (z < 0 || z >= kernel.g_matrix.cols())
    throw std::invalid_argument("discrete_filter_step: symbol out of range");
  Eigen::VectorXd u = st.alpha.cwiseProduct(kernel.g_matrix.col(z));
  const double c = u.sum();
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::runtime_error("discrete_filter_step: zero or non-finite step mass");
  DiscreteFilterState out;
  out.loglik_accum = st.loglik_accum + std::log(c);
  u /= c;
  out.alpha.noalias() = grid.q1_matrix.transpose() * u;
  return out;
}

double loglik_h1_quantized(std::span<const int> z, const QuantizedKernel& kernel,
                           const StateGrid& grid) {
  check_symbols(z, static_cast<int>(kernel.g_matrix.cols()));
  return mass_loglik_h1(z, kernel, grid) +
         reference_correction(z, kernel.lengths, kernel.support_width);
}

std::vector<double> h0_cell_masses(const Quantizer& q, const ModelParams& params) {
  params.validate();
  const int n = q.cells();
  std::vector<double> p0(static_cast<std::size_t>(n));
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double lo = (j == 0) ? -inf : q.boundaries[static_cast<std::size_t>(j)];
    const double hi = (j == n - 1) ? inf : q.boundaries[static_cast<std::size_t>(j) + 1];
    p0[static_cast<std::size_t>(j)] = normal_interval_mass(lo, hi, params.sigma);
  }
  return p0;
}

double loglik_h0_quantized(std::span<const int> z, const Quantizer& q,
                           const ModelParams& params) {
  const std::vector<double> p0 = h0_cell_masses(q, params);
  return mass_loglik_h0(z, p0, q.cells()) +
         reference_correction(z, q.lengths, q.support_hi() - q.support_lo());
}

double llr_quantized(std::span<const int> z, const Quantizer& q,
                     const QuantizedKernel& kernel, const StateGrid& grid,
                     const ModelParams& params) {
  if (z.size() < 2)
    throw std::invalid_argument("llr_quantized: need a sequence of length >= 2");
  const std::vector<double> p0 = h0_cell_masses(q, params);
  const double diff = mass_loglik_h0(z, p0, q.cells()) - mass_loglik_h1(z, kernel, grid);
  return diff / static_cast<double>(z.size() - 1);
}

}  // namespace hmq
