// Finite-n Neyman-Pearson harness: threshold calibration at level alpha and
// miss-probability estimation. The test rejects H0 when the normalized LLR
// falls below the threshold.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hmq/model.hpp"
#include "hmq/quantizer.hpp"

namespace hmq {

using LlrFn = std::function<double(std::span<const double>)>;

struct NPTestResult {
  double alpha = 0.0;
  double threshold = 0.0;
  double miss_prob = 0.0;
  int n_sensors = 0;
  int n_trials = 0;
};

struct MissEstimate {
  double miss_prob = 0.0;
  double std_error = 0.0;
  bool zero_miss = false;
  double upper_bound = 0.0;  // rule-of-three bound when zero_miss
};

// Empirical lower-tail alpha-quantile of H0 LLRs with the conservative (floor)
// order statistic, so the false-alarm rate cannot exceed alpha.
double calibrate_threshold(const LlrFn& llr_fn, const ModelParams& params, int n,
                           double alpha, int n_trials, std::uint64_t seed,
                           int workers = 1);

MissEstimate estimate_miss(const LlrFn& llr_fn, const ModelParams& params, int n,
                           double threshold, int n_trials, std::uint64_t seed,
                           int workers = 1);

struct GapCheckRow {
  int n = 0;
  double threshold = 0.0;
  double miss = 0.0;
  double miss_se = 0.0;
  bool zero_miss = false;
  double slope = 0.0;     // -(1/n) log(miss); from the upper bound when zero_miss
  double slope_se = 0.0;  // delta-method; 0 when zero_miss
};

// Quantized NP test across block lengths: calibrate at each n, estimate the
// miss probability, report slope estimates. Zero-miss rows carry the
// rule-of-three upper bound as a conservative slope.
std::vector<GapCheckRow> exponent_gap_check(const Quantizer& q,
                                            const ModelParams& params,
                                            double alpha,
                                            std::span<const int> n_list,
                                            int n_trials, std::uint64_t seed,
                                            int workers = 1);

// Same harness with the exact (unquantized) LLR.
std::vector<GapCheckRow> np_slope_scan(const LlrFn& llr_fn,
                                       const ModelParams& params, double alpha,
                                       std::span<const int> n_list, int n_trials,
                                       std::uint64_t seed, int workers = 1);

}  // namespace hmq
