#include <doctest.h>

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hmq/detector.hpp"
#include "hmq/exponent.hpp"
#include "hmq/likelihood.hpp"
#include "hmq/model.hpp"
#include "hmq/quantizer.hpp"
#include "hmq/rng.hpp"
#include "test_helpers.hpp"

namespace {

hmq::ModelParams params_with(double a, double sigma = 1.0, int m = 200) {
  hmq::ModelParams p;
  p.a = a;
  p.sigma = sigma;
  p.state_grid_size = m;
  return p;
}

hmq::LlrFn exact_llr(const hmq::ModelParams& p) {
  return [p](std::span<const double> y) { return hmq::llr(y, p); };
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("calibration keeps the false-alarm rate at or below the level") {
  const auto p = params_with(0.5);
  const auto fn = exact_llr(p);
  const int trials = 2000;
  for (double alpha : {0.05, 0.2, 0.5}) {
    const double tau = hmq::calibrate_threshold(fn, p, 50, alpha, trials, 5, 4);
    // Fresh H0 sample: empirical false-alarm rate within binomial noise of
    // alpha, never far above it.
    int fa = 0;
    for (int t = 0; t < trials; ++t) {
      const auto path = hmq::sample_path(p, hmq::Hypothesis::H0, 50,
                                         hmq::derive_seed(606, t));
      if (hmq::llr(path.observations, p) < tau) ++fa;
    }
    const double rate = static_cast<double>(fa) / trials;
    const double sd = std::sqrt(alpha * (1.0 - alpha) / trials);
    CHECK(rate <= alpha + 3.0 * sd);
    CHECK(rate >= alpha - 4.0 * sd - 2.0 / trials);
  }
}

TEST_CASE("threshold grows with the level") {
  const auto p = params_with(0.5);
  const auto fn = exact_llr(p);
  const double t05 = hmq::calibrate_threshold(fn, p, 50, 0.05, 1500, 6, 4);
  const double t20 = hmq::calibrate_threshold(fn, p, 50, 0.20, 1500, 6, 4);
  CHECK(t05 <= t20);
}

TEST_CASE("degenerate statistics are rejected") {
  const auto p = params_with(0.5);
  const hmq::LlrFn flat = [](std::span<const double>) { return 1.0; };
  CHECK(message_contains(thrown_message([&] {
          (void)hmq::calibrate_threshold(flat, p, 20, 0.1, 200, 7);
        }),
        "degenerate"));
}

TEST_CASE("miss estimation at extreme thresholds") {
  const auto p = params_with(0.5);
  const auto fn = exact_llr(p);
  const auto all_miss = hmq::estimate_miss(fn, p, 30, -1e9, 400, 8, 4);
  CHECK(all_miss.miss_prob == 1.0);
  CHECK_FALSE(all_miss.zero_miss);
  const auto no_miss = hmq::estimate_miss(fn, p, 30, 1e9, 400, 8, 4);
  CHECK(no_miss.miss_prob == 0.0);
  CHECK(no_miss.zero_miss);
  CHECK(no_miss.upper_bound == doctest::Approx(3.0 / 400.0));
}

TEST_CASE("exact-llr slopes: large-n deficit and the exponent ceiling") {
  const auto p = params_with(0.5);
  const auto fn = exact_llr(p);
  const std::vector<int> n_list{20, 50};
  const auto rows = hmq::np_slope_scan(fn, p, 0.1, n_list, 8000, 9, 4);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].zero_miss);
  CHECK_FALSE(rows[1].zero_miss);
  // At desk scale the finite-n slope is largest at small n and sits below the
  // asymptotic exponent.
  CHECK(rows[0].slope > rows[1].slope);
  const auto k_hat = hmq::estimate_K(p, 20000, 16, 10, 4);
  for (const auto& r : rows) {
    CHECK(r.slope <= k_hat.value + 3.0 * (k_hat.std_error + r.slope_se));
    CHECK(r.slope > 0.0);
    CHECK(r.slope_se > 0.0);
    CHECK(r.slope == doctest::Approx(-std::log(r.miss) / r.n).epsilon(1e-12));
  }

  // A long block with few trials gives zero observed misses and the
  // rule-of-three slope bound.
  const std::vector<int> long_n{200};
  const auto bound_rows = hmq::np_slope_scan(fn, p, 0.1, long_n, 500, 11, 4);
  REQUIRE(bound_rows.size() == 1);
  CHECK(bound_rows[0].zero_miss);
  CHECK(bound_rows[0].slope ==
        doctest::Approx(-std::log(3.0 / 500.0) / 200.0).epsilon(1e-12));
  CHECK(bound_rows[0].slope_se == 0.0);
}

TEST_CASE("quantized slopes order by resolution and level") {
  auto p = params_with(0.5, 1.0, 60);
  const auto dens = hmq::density_uniform(p.y_lo, p.y_hi);
  const auto q64 = hmq::build_quantizer(dens, 64);
  const auto q4 = hmq::build_quantizer(dens, 4);
  const std::vector<int> n_list{50};
  const int trials = 2000;

  const auto r64_lo = hmq::exponent_gap_check(q64, p, 0.05, n_list, trials, 12, 4);
  const auto r64_hi = hmq::exponent_gap_check(q64, p, 0.20, n_list, trials, 12, 4);
  const auto r4_lo = hmq::exponent_gap_check(q4, p, 0.05, n_list, trials, 12, 4);
  REQUIRE(r64_lo.size() == 1);

  // Finer quantization detects better at every level tried.
  CHECK(r64_lo[0].slope > r4_lo[0].slope + 0.02);
  // At desk scale the slope still grows with the allowed false-alarm rate.
  CHECK(r64_hi[0].slope > r64_lo[0].slope + 0.01);

  // The quantized detector cannot beat the exact-llr one on the same data
  // budget (margin covers Monte Carlo noise).
  const auto exact_rows =
      hmq::np_slope_scan(exact_llr(p), p, 0.05, n_list, trials, 12, 4);
  CHECK(r4_lo[0].slope + 0.02 < exact_rows[0].slope);
}

TEST_CASE("scan rows are independent of the worker count") {
  const auto p = params_with(0.5);
  const auto fn = exact_llr(p);
  const std::vector<int> n_list{20, 40};
  const auto one = hmq::np_slope_scan(fn, p, 0.1, n_list, 600, 13, 1);
  const auto eight = hmq::np_slope_scan(fn, p, 0.1, n_list, 600, 13, 8);
  REQUIRE(one.size() == eight.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].threshold == eight[i].threshold);
    CHECK(one[i].miss == eight[i].miss);
    CHECK(one[i].slope == eight[i].slope);
  }
}

TEST_CASE("argument validation") {
  const auto p = params_with(0.5);
  const auto fn = exact_llr(p);
  CHECK_THROWS_AS((void)hmq::calibrate_threshold(fn, p, 20, 0.0, 200, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)hmq::calibrate_threshold(fn, p, 20, 1.0, 200, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)hmq::calibrate_threshold(fn, p, 20, 0.1, 50, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)hmq::calibrate_threshold(fn, p, 0, 0.1, 200, 1),
                  std::invalid_argument);
  const std::vector<int> bad{0};
  CHECK_THROWS_AS((void)hmq::np_slope_scan(fn, p, 0.1, bad, 200, 1),
                  std::invalid_argument);
}

}  // TEST_SUITE
