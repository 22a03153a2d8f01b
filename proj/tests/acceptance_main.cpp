// End-to-end acceptance checks for the quantized-detection library. Each check
// prints one PASS/FAIL line with the measured numbers; the exit code is the
// number of failures, so the suite stays honest about anything it cannot meet.
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hmq/hmq.hpp"

namespace {

namespace fs = std::filesystem;

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s  %2d  %-38s  %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

template <class Fn>
void run_check(int id, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

hmq::ModelParams params_with(double a, double sigma = 1.0, int m = 200) {
  hmq::ModelParams p;
  p.a = a;
  p.sigma = sigma;
  p.state_grid_size = m;
  return p;
}

constexpr int kWorkers = 8;

// ---------------------------------------------------------------------------
// Shared closed forms and estimated tables.

double k_closed_a0(double sigma) {
  const double v0 = sigma * sigma;
  const double v1 = 1.0 + v0;
  return 0.5 * (std::log(v1 / v0) + v0 / v1 - 1.0);
}

struct Tables {
  std::vector<double> grid;
  std::vector<double> p0;                // N(0,1) density on the grid
  std::map<int, hmq::FTable> f_by_a10;   // estimated F, keyed by round(10 a)
};

const Tables& shared_tables() {
  static const Tables tables = [] {
    Tables t;
    t.grid = hmq::linspace(-10.0, 10.0, 4097);
    t.p0.resize(t.grid.size());
    for (std::size_t i = 0; i < t.grid.size(); ++i)
      t.p0[i] = hmq::normal_pdf(t.grid[i], 1.0);
    // Bandwidth is pinned well above the grid step (0.15 ~ 31 steps) so the
    // estimated table is smooth at node scale. The Hoelder-equality check
    // compares a trapezoid-normalized density against Simpson integrals of
    // the same table; node-scale estimator noise makes those two rules
    // disagree at ~3e-6 relative, swamping the 1e-6 equality tolerance,
    // while any smooth table keeps them within ~1e-9. Smoothing bias is
    // immaterial: every check below compares quantities derived from the
    // same table.
    constexpr double kBandwidth = 0.15;
    for (int a10 = 1; a10 <= 9; ++a10) {
      const auto p = params_with(a10 / 10.0);
      t.f_by_a10[a10] = hmq::estimate_F(p, 20000, 8, 30, 30, kBandwidth,
                                        t.grid, hmq::derive_seed(4242, a10),
                                        kWorkers);
    }
    return t;
  }();
  return tables;
}

// Exact a=0 tables: p0 = phi, F = y^2/4 at sigma = 1.
hmq::FTable exact_f_a0(const std::vector<double>& grid) {
  hmq::FTable f;
  f.grid = grid;
  f.values.resize(grid.size());
  f.counts.assign(grid.size(), 1);
  for (std::size_t i = 0; i < grid.size(); ++i)
    f.values[i] = 0.25 * grid[i] * grid[i];
  return f;
}

// ---------------------------------------------------------------------------
// Check 1: long-run LLR of the exact detector recovers the a=0 closed form.

void check_exponent_recovery() {
  const auto p = params_with(0.0);
  const auto est = hmq::estimate_K(p, 20000, 32, 1001, kWorkers);
  const double target = k_closed_a0(1.0);
  const double gap = std::abs(est.value - target);
  report(1, "exact exponent, a=0 closed form", gap <= 3.0 * est.std_error,
         "K_hat=" + fmt(est.value) + " se=" + fmt(est.std_error) +
             " target=" + fmt(target) + " |gap|=" + fmt(gap) + " (<= 3 se = " +
             fmt(3.0 * est.std_error) + ")");
}

// ---------------------------------------------------------------------------
// Check 2: forward filter vs exhaustive path sum on random small instances.

double path_sum(const std::vector<int>& z, const hmq::QuantizedKernel& kernel,
                const hmq::StateGrid& grid) {
  const int m = static_cast<int>(grid.nodes.size());
  hmq::KahanSum total;
  std::vector<int> idx(z.size(), 0);
  for (;;) {
    double prod = grid.stationary[idx[0]] * kernel.g_matrix(idx[0], z[0]);
    for (std::size_t k = 1; k < z.size(); ++k)
      prod *= grid.q1_matrix(idx[k - 1], idx[k]) * kernel.g_matrix(idx[k], z[k]);
    total.add(prod);
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == m) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  return total.value();
}

void check_filter_vs_path_sum() {
  std::mt19937_64 rng(8675309);
  std::uniform_int_distribution<int> pick_n(1, 6);
  std::uniform_int_distribution<int> pick_cells(1, 4);
  std::uniform_real_distribution<double> pick_a(0.0, 0.95);
  std::uniform_real_distribution<double> pick_sigma(0.5, 2.0);
  std::uniform_real_distribution<double> edge(-8.0, 8.0);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = pick_n(rng);
    const int m_cap = std::min(
        20, static_cast<int>(std::floor(std::pow(2e7, 1.0 / (n + 1)))));
    std::uniform_int_distribution<int> pick_m(2, m_cap);
    const auto p = params_with(pick_a(rng), pick_sigma(rng), pick_m(rng));
    const auto grid = hmq::build_state_grid(p);
    const int n_cells = pick_cells(rng);
    hmq::Quantizer q;
    for (;;) {
      std::vector<double> edges{-10.0, 10.0};
      for (int j = 1; j < n_cells; ++j) edges.push_back(edge(rng));
      std::sort(edges.begin(), edges.end());
      bool ok = true;
      for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i] - edges[i - 1] < 0.05) ok = false;
      if (ok) {
        q = hmq::Quantizer::from_boundaries(edges);
        break;
      }
    }
    const auto kernel = hmq::build_kernel(q, p, grid);
    std::uniform_int_distribution<int> pick_z(0, n_cells - 1);
    std::vector<int> z(static_cast<std::size_t>(n) + 1);
    for (auto& s : z) s = pick_z(rng);
    double corr = 0.0;
    for (int s : z) corr += std::log(kernel.support_width / kernel.lengths[s]);
    const double expect = std::log(path_sum(z, kernel, grid)) + corr;
    worst = std::max(worst,
                     std::abs(hmq::loglik_h1_quantized(z, kernel, grid) - expect));
  }
  report(2, "quantized filter vs exhaustive sum", worst < 1e-10,
         "50 instances, max |gap|=" + fmt(worst, "%.3e") + " (< 1e-10)");
}

// ---------------------------------------------------------------------------
// Check 3: innovations filter vs dense Gaussian log-density.

void check_filter_vs_dense() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> len(1, 10);
  std::uniform_real_distribution<double> ua(0.0, 0.95);
  std::uniform_real_distribution<double> usigma(0.5, 2.0);
  std::normal_distribution<double> obs(0.0, 1.5);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto p = params_with(ua(rng), usigma(rng));
    const int n = len(rng);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (auto& v : y) v = obs(rng);
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cov(i, j) = std::pow(p.a, std::abs(i - j)) +
                    (i == j ? p.sigma * p.sigma : 0.0);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    const double dense =
        -0.5 * (n * hmq::log_2pi + logdet + yv.dot(llt.solve(yv)));
    worst = std::max(worst, std::abs(hmq::loglik_h1(y, p) - dense));
  }
  report(3, "exact filter vs dense Gaussian", worst < 1e-8,
         "100 windows, max |gap|=" + fmt(worst, "%.3e") + " (< 1e-8)");
}

// ---------------------------------------------------------------------------
// Check 4: the designed density attains the loss bound; others exceed it.

void check_bound_attainment() {
  const auto& t = shared_tables();
  bool pass = true;
  std::string detail;
  for (int a10 : {3, 6, 9}) {
    const auto& f = t.f_by_a10.at(a10);
    const auto opt = hmq::density_optimal(t.grid, f.values, t.p0);
    const auto d_opt = hmq::compute_D(opt, f, t.p0);
    const double bound = hmq::lower_bound_D(f, t.p0);
    const double rel = std::abs(d_opt.value - bound) / bound;

    const auto d_unif = hmq::compute_D(
        hmq::density_uniform(-10.0, 10.0, static_cast<int>(t.grid.size())), f,
        t.p0);
    hmq::PointDensity pert = opt;
    for (std::size_t i = 0; i < pert.values.size(); ++i)
      pert.values[i] *= 1.0 + 0.3 * std::sin(pert.grid[i]);
    const double total = hmq::trapezoid(pert.values, t.grid[1] - t.grid[0]);
    for (auto& v : pert.values) v /= total;
    const auto d_pert = hmq::compute_D(pert, f, t.p0);

    const bool ok = !d_opt.divergent && rel <= 1e-6 && !d_unif.divergent &&
                    d_unif.value > bound * (1.0 + 1e-6) && !d_pert.divergent &&
                    d_pert.value > bound * (1.0 + 1e-6);
    pass = pass && ok;
    detail += "a=0." + std::to_string(a10) + ": rel_gap=" + fmt(rel, "%.2e") +
              " unif/bound=" + fmt(d_unif.value / bound) +
              " pert/bound=" + fmt(d_pert.value / bound) + "  ";
  }
  report(4, "optimal density attains the bound", pass, detail);
}

// ---------------------------------------------------------------------------
// Check 5: frozen loss values at a=0, sigma=1.

void check_frozen_losses() {
  const auto& t = shared_tables();
  const auto f = exact_f_a0(t.grid);
  const auto d_unif = hmq::compute_D(
      hmq::density_uniform(-10.0, 10.0, static_cast<int>(t.grid.size())), f, t.p0);
  const auto opt = hmq::density_optimal(t.grid, f.values, t.p0);
  const auto d_opt = hmq::compute_D(opt, f, t.p0);
  const bool pass = !d_unif.divergent && !d_opt.divergent &&
                    std::abs(d_unif.value - 400.0 / 96.0) <= 1e-3 &&
                    std::abs(d_opt.value - 0.5270514) <= 1e-3;
  report(5, "frozen a=0 losses", pass,
         "D_uniform=" + fmt(d_unif.value, "%.7f") + " (target 4.1666667), " +
             "D_optimal=" + fmt(d_opt.value, "%.7f") + " (target 0.5270514)");
}

// ---------------------------------------------------------------------------
// Check 6: closed-form N^-2 convergence of the quantized exponent at a=0.

void check_quadratic_convergence() {
  const auto& t = shared_tables();
  const auto p = params_with(0.0);
  const double k = hmq::iid_exponent(p);
  const std::vector<int> n_list{8, 16, 32, 64, 128};
  const auto f = exact_f_a0(t.grid);

  bool pass = true;
  std::string detail;
  const auto opt = hmq::density_optimal(t.grid, f.values, t.p0);
  const auto unif =
      hmq::density_uniform(-10.0, 10.0, static_cast<int>(t.grid.size()));
  for (const auto* entry : {&unif, &opt}) {
    const bool is_opt = entry == &opt;
    std::vector<double> lx, ly;
    double last_gap = 0.0;
    for (int n : n_list) {
      const double kn =
          hmq::iid_quantized_exponent(hmq::build_quantizer(*entry, n), p);
      last_gap = k - kn;
      lx.push_back(std::log(n));
      ly.push_back(std::log(last_gap));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(ly.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = num / den;
    const double scaled = 128.0 * 128.0 * last_gap;
    const auto d = hmq::compute_D(*entry, f, t.p0);
    const double ratio = scaled / d.value;
    pass = pass && std::abs(slope + 2.0) <= 0.3 && std::abs(ratio - 1.0) <= 0.10;
    detail += std::string(is_opt ? "optimal" : "uniform") +
              ": slope=" + fmt(slope, "%.4f") + " N^2 gap/D=" + fmt(ratio, "%.4f") +
              "  ";
  }
  report(6, "closed-form N^-2 convergence", pass, detail);
}

// ---------------------------------------------------------------------------
// Check 7: designed density beats uniform for every a; iid design diverges.

void check_design_dominates() {
  const auto& t = shared_tables();
  const auto unif =
      hmq::density_uniform(-10.0, 10.0, static_cast<int>(t.grid.size()));
  bool pass = true;
  std::string detail;
  for (int a10 = 1; a10 <= 9; ++a10) {
    const auto& f = t.f_by_a10.at(a10);
    const auto d_opt =
        hmq::compute_D(hmq::density_optimal(t.grid, f.values, t.p0), f, t.p0);
    const auto d_unif = hmq::compute_D(unif, f, t.p0);
    const auto d_iid = hmq::compute_D(
        hmq::density_iid(params_with(a10 / 10.0),
                         static_cast<int>(t.grid.size())),
        f, t.p0);
    const bool ok = !d_opt.divergent && !d_unif.divergent &&
                    d_opt.value < d_unif.value && d_iid.divergent;
    pass = pass && ok;
    if (!ok)
      detail += "a=0." + std::to_string(a10) + ": opt=" + fmt(d_opt.value) +
                " unif=" + fmt(d_unif.value) +
                " iid_divergent=" + (d_iid.divergent ? "yes" : "no") + "  ";
  }
  if (pass) detail = "a=0.1..0.9: optimal < uniform, iid divergent at every a";
  report(7, "designed density dominates", pass, detail);
}

// ---------------------------------------------------------------------------
// Check 8: behavior of the densities at the uninformative point y=0.

void check_density_origin() {
  const auto& t = shared_tables();
  const std::size_t mid = t.grid.size() / 2;
  const auto iid = hmq::density_iid(params_with(0.5));
  double z1 = 0.0, z5 = 0.0, z9 = 0.0;
  for (int a10 : {1, 5, 9}) {
    const auto& f = t.f_by_a10.at(a10);
    const double v =
        hmq::density_optimal(t.grid, f.values, t.p0).values[mid];
    (a10 == 1 ? z1 : a10 == 5 ? z5 : z9) = v;
  }
  const bool pass =
      iid.values[mid] == 0.0 && z1 > 0.0 && z5 > z1 && z9 > z5;
  report(8, "origin behavior of the densities", pass,
         "zeta_iid(0)=" + fmt(iid.values[mid]) + " (exact 0), zeta_opt(0): a=0.1: " +
             fmt(z1, "%.4f") + ", a=0.5: " + fmt(z5, "%.4f") + ", a=0.9: " +
             fmt(z9, "%.4f") + " (increasing)");
}

// ---------------------------------------------------------------------------
// Check 9: finite-n slopes of the calibrated test vs the asymptotic exponent.
//
// This is a genuinely asymptotic statement. At this trial budget the measured
// slope sequence dips between n=20 and n=50 (the small-n slopes are inflated
// by the threshold term), and at n=200 the miss probability is far below
// 1/n_trials, so only a rule-of-three upper bound is available. The check is
// implemented exactly as stated and reports the measured table honestly.

void check_slope_convergence() {
  const auto p = params_with(0.5);
  const auto fn = [p](std::span<const double> y) { return hmq::llr(y, p); };
  const std::vector<int> n_list{20, 50, 100, 200};
  const auto rows = hmq::np_slope_scan(fn, p, 0.1, n_list, 20000, 1009, kWorkers);
  const auto k = hmq::estimate_K(p, 20000, 32, 1010, kWorkers);

  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].slope < rows[i - 1].slope) monotone = false;
  const auto& last = rows.back();
  const double combined_se = last.slope_se + k.std_error;
  const double gap = std::abs(last.slope - k.value);
  const bool close = gap <= 3.0 * combined_se;

  std::string detail = "slopes:";
  for (const auto& r : rows)
    detail += " n=" + std::to_string(r.n) + ": " + fmt(r.slope, "%.4f") +
              (r.zero_miss ? " (upper bound)" : "");
  detail += "; K_hat=" + fmt(k.value, "%.4f") + " se=" + fmt(k.std_error, "%.5f") +
            "; nondecreasing=" + (monotone ? "yes" : "no") +
            ", |slope(200)-K_hat|=" + fmt(gap, "%.4f") +
            " vs 3 se=" + fmt(3.0 * combined_se, "%.4f");
  report(9, "finite-n slope convergence", monotone && close, detail);
}

// ---------------------------------------------------------------------------
// Check 10: byte-identical CSV output across worker counts.

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_worker_determinism() {
  const fs::path base = fs::temp_directory_path() / "hmq-acceptance";
  fs::remove_all(base);
  const auto run = [&](const std::string& body, const std::string& name,
                       int workers) {
    std::ostringstream cfg;
    cfg << R"({)" << body << R"(, "mc": {"path_len": 400, "n_paths": 4, "seed": 77, "workers": )"
        << workers << R"(}, "output_dir": ")"
        << (base / (name + "-w" + std::to_string(workers))).string() << R"("})";
    std::ostringstream log;
    return hmq::run_experiment(hmq::parse_config(cfg.str()), log);
  };
  const std::vector<std::pair<std::string, std::string>> experiments{
      {"np",
       R"("experiment": "np_test", "model": {"a": 0.5, "state_grid_size": 40},
          "quantizer": {"strategy": "uniform", "N": 8},
          "sweep": {"n_list": [20, 30], "alpha": 0.2, "n_trials": 300})"},
      {"sweep",
       R"("experiment": "exponent_sweep", "model": {"a": 0.3, "state_grid_size": 60},
          "quantizer": {"strategy": "uniform", "N_list": [4, 8]})"},
      {"fig2",
       R"("experiment": "fig2_loss_vs_a", "model": {"a": 0.5},
          "f_estimation": {"window_m": 8, "window_k": 8, "eval_grid_size": 257},
          "sweep": {"a_list": [0.5]})"}};
  bool pass = true;
  std::string detail;
  for (const auto& [name, body] : experiments) {
    const auto out1 = run(body, name, 1);
    const auto out8 = run(body, name, 8);
    bool same = out1.files.size() == out8.files.size();
    for (std::size_t i = 0; same && i < out1.files.size(); ++i)
      same = slurp(out1.files[i]) == slurp(out8.files[i]);
    pass = pass && same;
    detail += name + ": " + (same ? "identical" : "DIFFERENT") + "  ";
  }
  report(10, "worker-count determinism", pass, detail);
}

}  // namespace

int main() {
  std::printf("acceptance checks (library version %s)\n", hmq::version);
  run_check(1, "exact exponent, a=0 closed form", check_exponent_recovery);
  run_check(2, "quantized filter vs exhaustive sum", check_filter_vs_path_sum);
  run_check(3, "exact filter vs dense Gaussian", check_filter_vs_dense);
  run_check(4, "optimal density attains the bound", check_bound_attainment);
  run_check(5, "frozen a=0 losses", check_frozen_losses);
  run_check(6, "closed-form N^-2 convergence", check_quadratic_convergence);
  run_check(7, "designed density dominates", check_design_dominates);
  run_check(8, "origin behavior of the densities", check_density_origin);
  run_check(9, "finite-n slope convergence", check_slope_convergence);
  run_check(10, "worker-count determinism", check_worker_determinism);
  std::printf("%d/10 checks passed\n", 10 - g_failures);
  return g_failures;
}
