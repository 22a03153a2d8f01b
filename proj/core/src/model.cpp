#include "hmq/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hmq/numerics.hpp"

namespace hmq {

void ModelParams::validate() const {
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("model.a must be in [0, 1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("model.sigma must be positive");
  if (!(state_trunc > 0.0)) throw std::invalid_argument("model.state_trunc must be positive");
  if (state_grid_size < 2) throw std::invalid_argument("model.state_grid_size must be >= 2");
  if (!(y_lo < y_hi)) throw std::invalid_argument("model.obs_support must be a nonempty interval");
}

StateGrid build_state_grid(const ModelParams& params) {
  params.validate();
  const int m = params.state_grid_size;
  const double c = params.state_trunc;
  const double h = 2.0 * c / m;
  const double s = std::sqrt(1.0 - params.a * params.a);

  StateGrid grid;
  grid.nodes.resize(m);
  grid.weights = Eigen::VectorXd::Constant(m, h);
  for (int i = 0; i < m; ++i) grid.nodes[i] = -c + (i + 0.5) * h;

  // Transition density: N(a x, 1-a^2) restricted to [-c, c], renormalized.
  // rho tracks the min/max ratio of the density itself.
  grid.q1_matrix.resize(m, m);
  double dens_min = std::numeric_limits<double>::infinity();
  double dens_max = 0.0;
  for (int i = 0; i < m; ++i) {
    const double mu = params.a * grid.nodes[i];
    const double z = normal_interval_mass(-c - mu, c - mu, s);
    for (int j = 0; j < m; ++j) {
      const double dens = normal_pdf(grid.nodes[j] - mu, s) / z;
      grid.q1_matrix(i, j) = dens * h;
      dens_min = std::min(dens_min, dens);
      dens_max = std::max(dens_max, dens);
    }
    grid.q1_matrix.row(i) /= grid.q1_matrix.row(i).sum();
  }
  grid.rho = dens_min / dens_max;

  Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 1.0 / m);
  constexpr int max_iters = 200000;
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd next = grid.q1_matrix.transpose() * v;
    next /= next.sum();
    const double delta = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (delta < 1e-14) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error("build_state_grid: power iteration did not converge");
  grid.stationary = v;
  return grid;
}

PathSample sample_path(const ModelParams& params, Hypothesis hypothesis, int n,
                       std::uint64_t seed) {
  NormalStream src(seed);
  return detail::sample_path_src(params, hypothesis, n, src);
}

}  // namespace hmq
