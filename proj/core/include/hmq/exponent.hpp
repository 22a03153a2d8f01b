// Monte Carlo and quadrature engines for the error exponent K, its quantized
// counterpart K_N, the conditional score moment F, and the exponent loss D.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hmq/model.hpp"
#include "hmq/quantized_likelihood.hpp"
#include "hmq/quantizer.hpp"

namespace hmq {

struct ExponentEstimate {
  double value = 0.0;      // nats per sample
  double std_error = 0.0;  // across replicates
  long n_samples = 0;      // replicate count
};

struct FTable {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<long> counts;  // effective anchors near each grid point; 0 = extrapolated
};

// Ergodic-average estimate of K: one long H0 path per replicate, normalized LLR
// per path, mean and standard error across replicates.
ExponentEstimate estimate_K(const ModelParams& params, int path_len, int n_paths,
                            std::uint64_t seed, int workers = 1);

// Same with quantized observations and the discrete-state filter.
ExponentEstimate estimate_KN(const Quantizer& q, const ModelParams& params,
                             const StateGrid& grid, int path_len, int n_paths,
                             std::uint64_t seed, int workers = 1);

// Kernel regression of squared window scores on the anchor observation
// (Gaussian kernel, binned Nadaraya-Watson). bandwidth <= 0 selects
// 0.25 * std(anchors) * n_anchors^{-1/5}. Empty neighborhoods are filled from
// the nearest populated grid point and flagged with counts = 0.
FTable estimate_F(const ModelParams& params, int path_len, int n_paths,
                  int window_m, int window_k, double bandwidth,
                  std::span<const double> eval_grid, std::uint64_t seed,
                  int workers = 1);

struct DResult {
  bool divergent = false;
  double value = 0.0;  // meaningful only when !divergent
};

// (1/24) Simpson integral of p0 F / zeta^2 on the common grid. Divergence is
// detected by comparing three nested grid refinements; a zeta zero under
// positive p0 F makes the result divergent rather than an exception.
DResult compute_D(const PointDensity& zeta, const FTable& f,
                  std::span<const double> p0_values);

// (1/24) (integral of [p0 F]^{1/3})^3; evaluates both the plain-Lebesgue and
// the normalized-measure form and checks they agree.
double lower_bound_D(const FTable& f, std::span<const double> p0_values);

struct SweepRow {
  int n_cells = 0;
  double k_hat = 0.0, k_se = 0.0;
  double kn_hat = 0.0, kn_se = 0.0;
  double scaled_gap = 0.0;  // N^2 (K_hat - KN_hat)
};

// Estimates K once and K_N for each N with common random numbers (identical
// replicate seeds, hence identical H0 paths) so the gaps are paired.
std::vector<SweepRow> convergence_sweep(const ModelParams& params,
                                        const StateGrid& grid,
                                        const PointDensity& density,
                                        std::span<const int> n_list, int path_len,
                                        int n_paths, std::uint64_t seed,
                                        int workers = 1);

// Closed forms for the i.i.d. reduction (a = 0).
double iid_exponent(const ModelParams& params);  // KL(N(0,s^2) || N(0,1+s^2))
double iid_quantized_exponent(const Quantizer& q, const ModelParams& params);

}  // namespace hmq
