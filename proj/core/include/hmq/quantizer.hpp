// Scalar quantizers built by companding a model point density, and the three
// benchmark densities (uniform, i.i.d.-marginal, optimal).
#pragma once

#include <span>
#include <string>
#include <vector>

#include "hmq/model.hpp"

namespace hmq {

// Tabulated point density; trapezoid integral over grid is 1.
struct PointDensity {
  std::vector<double> grid;
  std::vector<double> values;
};

struct Quantizer {
  std::vector<double> boundaries;        // N+1 increasing edges
  std::vector<double> reps;              // cell centers
  std::vector<double> lengths;           // cell widths
  std::vector<double> specific_density;  // 1/(N * length)

  int cells() const { return static_cast<int>(reps.size()); }
  double support_lo() const { return boundaries.front(); }
  double support_hi() const { return boundaries.back(); }

  // Builds the derived fields from explicit edges (reps at centers).
  static Quantizer from_boundaries(std::vector<double> edges);
};

PointDensity density_uniform(double y_lo, double y_hi, int grid_size = 4097);

// Density designed as if observations were i.i.d.: zeta ~ [p0 * F_iid]^{1/3}
// with F_iid the squared derivative of the marginal log-ratio. Independent of a.
PointDensity density_iid(const ModelParams& params, int grid_size = 4097);

// zeta ~ [p0 * F]^{1/3}, trapezoid-normalized, from tabulated F and p0.
PointDensity density_optimal(std::span<const double> grid,
                             std::span<const double> f_values,
                             std::span<const double> p0_values);

// Companding: cell edges at the j/N quantiles of the density.
Quantizer build_quantizer(const PointDensity& density, int n_cells);

// Cell index of y; cells are right-open except the last, out-of-support
// observations are clamped into the edge cells.
int quantize(const Quantizer& q, double y);

std::string to_json(const Quantizer& q);
std::string to_json(const PointDensity& d);
Quantizer quantizer_from_json(const std::string& text);
PointDensity density_from_json(const std::string& text);

}  // namespace hmq
