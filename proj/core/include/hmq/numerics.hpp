// Small numeric helpers: Gaussian densities/masses, quadrature, compensated sums.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hmq {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double log_2pi = 1.8378770664093454836;
inline constexpr double sqrt2 = 1.4142135623730950488;

inline double normal_pdf(double x, double sd = 1.0) {
  const double z = x / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * pi));
}

inline double log_normal_pdf(double x, double sd = 1.0) {
  const double z = x / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * log_2pi;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / sqrt2); }

// P(lo < Z*sd <= hi). Evaluated on the dominant tail with erfc so that far-tail
// cells keep relative precision instead of collapsing to 1 - 1.
inline double normal_interval_mass(double lo, double hi, double sd = 1.0) {
  assert(lo <= hi);
  const double a = lo / sd, b = hi / sd;
  if (a >= 0.0)  // both in the upper tail: Phi(b)-Phi(a) = (erfc(a/√2)-erfc(b/√2))/2
    return 0.5 * (std::erfc(a / sqrt2) - std::erfc(b / sqrt2));
  if (b <= 0.0)  // mirror
    return 0.5 * (std::erfc(-b / sqrt2) - std::erfc(-a / sqrt2));
  return normal_cdf(b) - normal_cdf(a);
}

// Compensated (Kahan) accumulator.
struct KahanSum {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline double trapezoid(std::span<const double> values, double h) {
  if (values.size() < 2) return 0.0;
  KahanSum s;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s.add(values[i]);
  return h * (0.5 * (values.front() + values.back()) + s.value());
}

// Composite Simpson; requires an odd point count (even interval count).
inline double simpson(std::span<const double> values, double h) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("simpson: need odd point count >= 3");
  KahanSum s;
  s.add(values.front());
  s.add(values.back());
  for (std::size_t i = 1; i + 1 < n; ++i) s.add(values[i] * (i % 2 ? 4.0 : 2.0));
  return s.value() * h / 3.0;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  assert(n >= 2);
  std::vector<double> g(static_cast<std::size_t>(n));
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + i * h;
  g.back() = hi;
  return g;
}

inline double mean_of(std::span<const double> v) {
  KahanSum s;
  for (double x : v) s.add(x);
  return v.empty() ? 0.0 : s.value() / static_cast<double>(v.size());
}

// Sample standard deviation (ddof=1); 0 for fewer than two values.
inline double stdev_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  KahanSum s;
  for (double x : v) s.add((x - m) * (x - m));
  return std::sqrt(s.value() / static_cast<double>(v.size() - 1));
}

}  // namespace hmq
