#include "hmq/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hmq/numerics.hpp"
#include "hmq/parallel.hpp"
#include "hmq/quantized_likelihood.hpp"
#include "hmq/rng.hpp"

namespace hmq {

namespace {

std::vector<double> simulate_llrs(const LlrFn& llr_fn, const ModelParams& params,
                                  Hypothesis hyp, int n, int n_trials,
                                  std::uint64_t seed, int workers) {
  std::vector<double> vals(static_cast<std::size_t>(n_trials));
  parallel_for(n_trials, workers, [&](long i) {
    const PathSample path =
        sample_path(params, hyp, n, derive_seed(seed, static_cast<std::uint64_t>(i)));
    vals[static_cast<std::size_t>(i)] = llr_fn(path.observations);
  });
  return vals;
}

GapCheckRow scan_row(const LlrFn& llr_fn, const ModelParams& params, double alpha,
                     int n, int n_trials, std::uint64_t seed, int workers) {
  // Disjoint deterministic seed streams for calibration and miss estimation.
  std::uint64_t s = seed + static_cast<std::uint64_t>(n);
  const std::uint64_t seed_cal = splitmix64(s);
  const std::uint64_t seed_miss = splitmix64(s);
  GapCheckRow row;
  row.n = n;
  row.threshold = calibrate_threshold(llr_fn, params, n, alpha, n_trials, seed_cal, workers);
  const MissEstimate miss =
      estimate_miss(llr_fn, params, n, row.threshold, n_trials, seed_miss, workers);
  row.miss = miss.miss_prob;
  row.miss_se = miss.std_error;
  row.zero_miss = miss.zero_miss;
  if (miss.zero_miss) {
    row.slope = -std::log(miss.upper_bound) / n;
    row.slope_se = 0.0;
  } else {
    row.slope = -std::log(miss.miss_prob) / n;
    row.slope_se = miss.std_error / (n * miss.miss_prob);
  }
  return row;
}

}  // namespace

double calibrate_threshold(const LlrFn& llr_fn, const ModelParams& params, int n,
                           double alpha, int n_trials, std::uint64_t seed,
                           int workers) {
  params.validate();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("calibrate_threshold: alpha must be in (0, 1)");
  if (n_trials < 100)
    throw std::invalid_argument("calibrate_threshold: need n_trials >= 100");
  std::vector<double> llrs =
      simulate_llrs(llr_fn, params, Hypothesis::H0, n, n_trials, seed, workers);
  std::sort(llrs.begin(), llrs.end());
  if (llrs.front() == llrs.back())
    throw std::runtime_error("calibrate_threshold: degenerate LLR sample");
  const auto k = static_cast<std::size_t>(std::floor(alpha * n_trials));
  return llrs[std::min(k, llrs.size() - 1)];
}

MissEstimate estimate_miss(const LlrFn& llr_fn, const ModelParams& params, int n,
                           double threshold, int n_trials, std::uint64_t seed,
                           int workers) {
  params.validate();
  if (n_trials < 100) throw std::invalid_argument("estimate_miss: need n_trials >= 100");
  const std::vector<double> llrs =
      simulate_llrs(llr_fn, params, Hypothesis::H1, n, n_trials, seed, workers);
  long misses = 0;
  for (double v : llrs)
    if (v >= threshold) ++misses;
  MissEstimate out;
  out.miss_prob = static_cast<double>(misses) / n_trials;
  out.std_error = std::sqrt(out.miss_prob * (1.0 - out.miss_prob) / n_trials);
  out.zero_miss = (misses == 0);
  out.upper_bound = out.zero_miss ? 3.0 / n_trials : out.miss_prob;
  return out;
}

std::vector<GapCheckRow> np_slope_scan(const LlrFn& llr_fn,
                                       const ModelParams& params, double alpha,
                                       std::span<const int> n_list, int n_trials,
                                       std::uint64_t seed, int workers) {
  params.validate();
  if (n_list.empty()) throw std::invalid_argument("np_slope_scan: empty n list");
  std::vector<GapCheckRow> rows;
  rows.reserve(n_list.size());
  for (const int n : n_list) {
    if (n < 1) throw std::invalid_argument("np_slope_scan: n must be >= 1");
    rows.push_back(scan_row(llr_fn, params, alpha, n, n_trials, seed, workers));
  }
  return rows;
}

std::vector<GapCheckRow> exponent_gap_check(const Quantizer& q,
                                            const ModelParams& params,
                                            double alpha,
                                            std::span<const int> n_list,
                                            int n_trials, std::uint64_t seed,
                                            int workers) {
  params.validate();
  const StateGrid grid = build_state_grid(params);
  const QuantizedKernel kernel = build_kernel(q, params, grid);
  const LlrFn fn = [&q, &kernel, &grid, params](std::span<const double> y) {
    std::vector<int> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = quantize(q, y[i]);
    return llr_quantized(z, q, kernel, grid, params);
  };
  return np_slope_scan(fn, params, alpha, n_list, n_trials, seed, workers);
}

}  // namespace hmq
