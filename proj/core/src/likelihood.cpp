#include "hmq/likelihood.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "hmq/numerics.hpp"

namespace hmq {

namespace {

void check_sequence(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("likelihood: empty observation sequence");
  for (double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("likelihood: non-finite observation");
}

Eigen::MatrixXd h1_covariance(int w, const ModelParams& params) {
  Eigen::MatrixXd cov(w, w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j)
      cov(i, j) = std::pow(params.a, std::abs(i - j)) +
                  (i == j ? params.sigma * params.sigma : 0.0);
  return cov;
}

}  // namespace

InnovationsFilterState innovations_step(const InnovationsFilterState& st, double y,
                                        const ModelParams& params) {
  const double s2 = params.sigma * params.sigma;
  const double innov_var = st.pred_var + s2;
  const double innov = y - st.pred_mean;
  InnovationsFilterState out;
  out.loglik_accum =
      st.loglik_accum - 0.5 * (log_2pi + std::log(innov_var) + innov * innov / innov_var);
  // Filtered moments, then one AR step ahead.
  const double gain = st.pred_var / innov_var;
  const double filt_mean = st.pred_mean + gain * innov;
  const double filt_var = st.pred_var * (1.0 - gain);
  out.pred_mean = params.a * filt_mean;
  out.pred_var = params.a * params.a * filt_var + (1.0 - params.a * params.a);
  return out;
}

double loglik_h0(std::span<const double> y, const ModelParams& params) {
  params.validate();
  check_sequence(y);
  KahanSum s;
  for (double v : y) s.add(log_normal_pdf(v, params.sigma));
  return s.value();
}

double loglik_h1(std::span<const double> y, const ModelParams& params) {
  params.validate();
  check_sequence(y);
  InnovationsFilterState st;
  for (double v : y) st = innovations_step(st, v, params);
  return st.loglik_accum;
}

double llr(std::span<const double> y, const ModelParams& params) {
  const double diff = loglik_h0(y, params) - loglik_h1(y, params);
  return y.size() > 1 ? diff / static_cast<double>(y.size() - 1) : diff;
}

WindowScore window_score(std::span<const double> window, int origin,
                         const ModelParams& params) {
  params.validate();
  check_sequence(window);
  const int w = static_cast<int>(window.size());
  if (origin < 0 || origin >= w)
    throw std::invalid_argument("window_score: origin outside window");
  Eigen::Map<const Eigen::VectorXd> yv(window.data(), w);
  Eigen::VectorXd solved = h1_covariance(w, params).llt().solve(yv);
  WindowScore out;
  out.window.assign(window.begin(), window.end());
  out.score = -window[static_cast<std::size_t>(origin)] / (params.sigma * params.sigma) +
              solved[origin];
  return out;
}

ScoreWeights::ScoreWeights(int window_m, int window_k, const ModelParams& params) {
  params.validate();
  if (window_m < 0 || window_k < 0)
    throw std::invalid_argument("ScoreWeights: negative window extent");
  const int w = window_m + window_k + 1;
  origin_ = window_m;
  h0_coeff_ = -1.0 / (params.sigma * params.sigma);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(w);
  e[origin_] = 1.0;
  Eigen::VectorXd r = h1_covariance(w, params).llt().solve(e);
  r_.assign(r.data(), r.data() + w);
}

double ScoreWeights::score(std::span<const double> window) const {
  if (static_cast<int>(window.size()) != window_size())
    throw std::invalid_argument("ScoreWeights::score: window size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) acc += r_[i] * window[i];
  return h0_coeff_ * window[static_cast<std::size_t>(origin_)] + acc;
}

}  // namespace hmq
