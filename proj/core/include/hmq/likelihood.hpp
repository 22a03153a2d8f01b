// Exact (unquantized) log-likelihoods, the normalized LLR, and the windowed
// score d log(p0/p1) / dy_0.
#pragma once

#include <span>
#include <vector>

#include "hmq/model.hpp"

namespace hmq {

// One-step predictive state of the innovations filter for the linear-Gaussian
// model; loglik_accum carries log p1(y_{0:k}) as observations stream in.
struct InnovationsFilterState {
  double pred_mean = 0.0;
  double pred_var = 1.0;  // stationary initialization: Var X_0 = 1
  double loglik_accum = 0.0;
};

// Absorbs one observation, returns the updated state.
InnovationsFilterState innovations_step(const InnovationsFilterState& st, double y,
                                        const ModelParams& params);

double loglik_h0(std::span<const double> y, const ModelParams& params);
double loglik_h1(std::span<const double> y, const ModelParams& params);

// (1/n) * (loglik_h0 - loglik_h1) for a sequence of length n+1; for a single
// observation the unnormalized log-ratio is returned.
double llr(std::span<const double> y, const ModelParams& params);

struct WindowScore {
  std::vector<double> window;
  double score = 0.0;
};

// Score of the window y = Y_{-m:k} where y[origin] is Y_0:
//   -y_0/sigma^2 + [Sigma1^{-1} y]_origin,  Sigma1 = sigma^2 I + (a^{|i-j|}).
WindowScore window_score(std::span<const double> window, int origin,
                         const ModelParams& params);

// Precomputed score weights for scoring many windows of one fixed shape.
class ScoreWeights {
 public:
  ScoreWeights(int window_m, int window_k, const ModelParams& params);
  double score(std::span<const double> window) const;  // window size m+k+1
  int window_size() const { return static_cast<int>(r_.size()); }
  int origin() const { return origin_; }

 private:
  std::vector<double> r_;  // Sigma1^{-1} e_origin
  int origin_;
  double h0_coeff_;
};

}  // namespace hmq
