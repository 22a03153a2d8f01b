// Truncated Gauss-Markov observation model.
//
// H0: Y_k = W_k,            W_k ~ N(0, sigma^2) i.i.d.
// H1: Y_k = X_k + W_k,      X_k = a X_{k-1} + sqrt(1-a^2) U_k,
// with the innovation truncated so the state stays in [-c, c].
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hmq/rng.hpp"

namespace hmq {

enum class Hypothesis { H0, H1 };

struct ModelParams {
  double a = 0.5;             // state correlation, in [0, 1)
  double sigma = 1.0;         // observation-noise std
  double state_trunc = 4.0;   // half-width c of the state support
  int state_grid_size = 200;  // M, nodes for discrete-state computations
  double y_lo = -10.0;        // quantization support
  double y_hi = 10.0;

  void validate() const;
};

struct StateGrid {
  Eigen::VectorXd nodes;       // M midpoints on [-c, c]
  Eigen::VectorXd weights;     // quadrature weights, sum 2c
  Eigen::MatrixXd q1_matrix;   // row-stochastic transition matrix
  Eigen::VectorXd stationary;  // left fixed point of q1_matrix
  double rho = 0.0;            // min/max ratio of the discretized density
};

struct PathSample {
  Hypothesis hypothesis = Hypothesis::H0;
  std::vector<double> states;  // empty under H0
  std::vector<double> observations;
};

StateGrid build_state_grid(const ModelParams& params);

PathSample sample_path(const ModelParams& params, Hypothesis hypothesis, int n,
                       std::uint64_t seed);

namespace detail {

// Truncated standard-normal draw on [lo, hi] by rejection. Negating every draw
// from the source mirrors the accepted sequence exactly, which the sign-flip
// symmetry test relies on.
template <class Source>
double truncated_normal(Source& src, double lo, double hi) {
  for (int i = 0; i < 100000; ++i) {
    const double x = src();
    if (x >= lo && x <= hi) return x;
  }
  throw std::runtime_error("truncated_normal: rejection failed to accept");
}

template <class Source>
PathSample sample_path_src(const ModelParams& params, Hypothesis hypothesis,
                           int n, Source& src) {
  params.validate();
  if (n < 1) throw std::invalid_argument("sample_path: n must be >= 1");
  PathSample path;
  path.hypothesis = hypothesis;
  path.observations.resize(static_cast<std::size_t>(n) + 1);
  if (hypothesis == Hypothesis::H0) {
    for (auto& y : path.observations) y = params.sigma * src();
    return path;
  }
  const double c = params.state_trunc;
  const double s = std::sqrt(1.0 - params.a * params.a);
  path.states.resize(static_cast<std::size_t>(n) + 1);
  path.states[0] = truncated_normal(src, -c, c);
  for (std::size_t k = 1; k < path.states.size(); ++k) {
    const double m = params.a * path.states[k - 1];
    path.states[k] = m + s * truncated_normal(src, (-c - m) / s, (c - m) / s);
  }
  for (std::size_t k = 0; k < path.observations.size(); ++k)
    path.observations[k] = path.states[k] + params.sigma * src();
  return path;
}

}  // namespace detail

}  // namespace hmq
