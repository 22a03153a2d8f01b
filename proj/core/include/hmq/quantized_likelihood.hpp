// Quantized-observation HMM: per-cell observation kernel, discrete-state
// forward filter, and the quantized LLR.
//
// Log-likelihoods are densities w.r.t. the reference measure that weights the
// cell of symbol z by length(z)/(y_hi - y_lo): log cell-mass plus the explicit
// correction sum_k log((y_hi - y_lo)/length(z_k)). The correction is identical
// under both hypotheses and cancels exactly in llr_quantized.
#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hmq/model.hpp"
#include "hmq/quantizer.hpp"

namespace hmq {

struct QuantizedKernel {
  Eigen::MatrixXd g_matrix;     // (m, j): P(Y in cell j | X = node m), tails clamped
  Eigen::MatrixXd g_density;    // g_matrix / cell length
  std::vector<double> lengths;  // cell lengths, for the reference-measure term
  double support_width = 0.0;
};

struct DiscreteFilterState {
  Eigen::VectorXd alpha;  // predictive state distribution on the grid
  double loglik_accum = 0.0;
};

QuantizedKernel build_kernel(const Quantizer& q, const ModelParams& params,
                             const StateGrid& grid);

// One filter step on cell masses: multiply by the z-column, normalize (the log
// normalizer is the conditional cell mass), propagate through the chain.
DiscreteFilterState discrete_filter_step(const DiscreteFilterState& st, int z,
                                         const QuantizedKernel& kernel,
                                         const StateGrid& grid);

double loglik_h1_quantized(std::span<const int> z, const QuantizedKernel& kernel,
                           const StateGrid& grid);

double loglik_h0_quantized(std::span<const int> z, const Quantizer& q,
                           const ModelParams& params);

// (1/n) (loglik_h0_quantized - loglik_h1_quantized); computed from the cell
// masses directly so the reference-measure corrections cancel exactly.
double llr_quantized(std::span<const int> z, const Quantizer& q,
                     const QuantizedKernel& kernel, const StateGrid& grid,
                     const ModelParams& params);

// H0 cell masses (N(0, sigma^2), tails absorbed into the edge cells).
std::vector<double> h0_cell_masses(const Quantizer& q, const ModelParams& params);

}  // namespace hmq
