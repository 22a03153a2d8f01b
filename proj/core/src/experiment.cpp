#include "hmq/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hmq/detector.hpp"
#include "hmq/exponent.hpp"
#include "hmq/likelihood.hpp"
#include "hmq/numerics.hpp"
#include "hmq/quantized_likelihood.hpp"
#include "hmq/quantizer.hpp"
#include "hmq/rng.hpp"
#include "hmq/version.hpp"

namespace hmq {

namespace {

using nlohmann::json;

// ---------- config parsing ----------

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end())
      fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <class T>
T get_field(const json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path.empty() ? key : path + "." + key, "wrong type");
  }
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "fig1_densities") return ExperimentKind::fig1_densities;
  if (name == "fig2_loss_vs_a") return ExperimentKind::fig2_loss_vs_a;
  if (name == "exponent_sweep") return ExperimentKind::exponent_sweep;
  if (name == "np_test") return ExperimentKind::np_test;
  fail("experiment", "must be one of fig1_densities, fig2_loss_vs_a, exponent_sweep, np_test");
}

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::fig1_densities: return "fig1_densities";
    case ExperimentKind::fig2_loss_vs_a: return "fig2_loss_vs_a";
    case ExperimentKind::exponent_sweep: return "exponent_sweep";
    case ExperimentKind::np_test: return "np_test";
  }
  return "?";
}

QuantStrategy parse_strategy(const std::string& name) {
  if (name == "none") return QuantStrategy::none;
  if (name == "uniform") return QuantStrategy::uniform;
  if (name == "iid") return QuantStrategy::iid;
  if (name == "optimal") return QuantStrategy::optimal;
  fail("quantizer.strategy", "must be one of none, uniform, iid, optimal");
}

const char* strategy_name(QuantStrategy s) {
  switch (s) {
    case QuantStrategy::none: return "none";
    case QuantStrategy::uniform: return "uniform";
    case QuantStrategy::iid: return "iid";
    case QuantStrategy::optimal: return "optimal";
  }
  return "?";
}

void fill_defaults(ExperimentConfig& cfg) {
  if (cfg.quantizer.n_list.empty()) cfg.quantizer.n_list = {8, 16, 32, 64, 128};
  switch (cfg.experiment) {
    case ExperimentKind::fig1_densities:
      if (cfg.sweep.a_list.empty()) cfg.sweep.a_list = {0.1, 0.5, 0.9};
      break;
    case ExperimentKind::fig2_loss_vs_a:
      if (cfg.sweep.a_list.empty())
        for (int i = 1; i <= 19; ++i) cfg.sweep.a_list.push_back(i / 20.0);
      break;
    case ExperimentKind::np_test:
      if (cfg.sweep.n_list.empty()) cfg.sweep.n_list = {20, 50, 100, 200};
      break;
    case ExperimentKind::exponent_sweep:
      break;
  }
}

void validate_config(const ExperimentConfig& cfg) {
  try {
    cfg.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config error at ") + e.what());
  }
  if (cfg.quantizer.n_cells < 1) fail("quantizer.N", "must be >= 1");
  for (int n : cfg.quantizer.n_list)
    if (n < 2) fail("quantizer.N_list", "entries must be >= 2");
  if (cfg.mc.path_len < 100) fail("mc.path_len", "must be >= 100");
  if (cfg.mc.n_paths < 1) fail("mc.n_paths", "must be >= 1");
  if (cfg.mc.workers < 0) fail("mc.workers", "must be >= 0");
  if (cfg.f_estimation.window_m < 1) fail("f_estimation.window_m", "must be >= 1");
  if (cfg.f_estimation.window_k < 1) fail("f_estimation.window_k", "must be >= 1");
  if (cfg.f_estimation.eval_grid_size < 5 || (cfg.f_estimation.eval_grid_size - 1) % 4 != 0)
    fail("f_estimation.eval_grid_size", "must be 4k+1 with k >= 1");
  if (!(cfg.sweep.alpha > 0.0 && cfg.sweep.alpha < 1.0)) fail("sweep.alpha", "must be in (0, 1)");
  if (cfg.sweep.n_trials < 100) fail("sweep.n_trials", "must be >= 100");
  for (double a : cfg.sweep.a_list)
    if (!(a >= 0.0 && a < 1.0)) fail("sweep.a_list", "entries must be in [0, 1)");
  for (int n : cfg.sweep.n_list)
    if (n < 1) fail("sweep.n_list", "entries must be >= 1");
  if (cfg.experiment != ExperimentKind::np_test &&
      cfg.quantizer.strategy == QuantStrategy::none)
    fail("quantizer.strategy", "'none' applies only to np_test");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config error: top level must be an object");
  reject_unknown(root, "",
                 {"experiment", "model", "quantizer", "mc", "f_estimation", "sweep",
                  "output_dir"});
  if (!root.contains("experiment")) fail("experiment", "missing required key");

  ExperimentConfig cfg;
  cfg.experiment = parse_kind(get_field<std::string>(root, "", "experiment", ""));
  cfg.output_dir = get_field<std::string>(root, "", "output_dir", cfg.output_dir);

  if (root.contains("model")) {
    const json& m = root.at("model");
    if (!m.is_object()) fail("model", "must be an object");
    reject_unknown(m, "model", {"a", "sigma", "state_trunc", "state_grid_size", "obs_support"});
    cfg.model.a = get_field<double>(m, "model", "a", cfg.model.a);
    cfg.model.sigma = get_field<double>(m, "model", "sigma", cfg.model.sigma);
    cfg.model.state_trunc = get_field<double>(m, "model", "state_trunc", cfg.model.state_trunc);
    cfg.model.state_grid_size =
        get_field<int>(m, "model", "state_grid_size", cfg.model.state_grid_size);
    if (m.contains("obs_support")) {
      const auto support = get_field<std::vector<double>>(m, "model", "obs_support", {});
      if (support.size() != 2) fail("model.obs_support", "must be [lo, hi]");
      cfg.model.y_lo = support[0];
      cfg.model.y_hi = support[1];
    }
  }
  if (root.contains("quantizer")) {
    const json& q = root.at("quantizer");
    if (!q.is_object()) fail("quantizer", "must be an object");
    reject_unknown(q, "quantizer", {"strategy", "N", "N_list"});
    cfg.quantizer.strategy =
        parse_strategy(get_field<std::string>(q, "quantizer", "strategy", "optimal"));
    cfg.quantizer.n_cells = get_field<int>(q, "quantizer", "N", cfg.quantizer.n_cells);
    cfg.quantizer.n_list = get_field<std::vector<int>>(q, "quantizer", "N_list", {});
  }
  if (root.contains("mc")) {
    const json& m = root.at("mc");
    if (!m.is_object()) fail("mc", "must be an object");
    reject_unknown(m, "mc", {"path_len", "n_paths", "seed", "workers"});
    cfg.mc.path_len = get_field<int>(m, "mc", "path_len", cfg.mc.path_len);
    cfg.mc.n_paths = get_field<int>(m, "mc", "n_paths", cfg.mc.n_paths);
    cfg.mc.seed = get_field<std::uint64_t>(m, "mc", "seed", cfg.mc.seed);
    cfg.mc.workers = get_field<int>(m, "mc", "workers", cfg.mc.workers);
  }
  if (root.contains("f_estimation")) {
    const json& f = root.at("f_estimation");
    if (!f.is_object()) fail("f_estimation", "must be an object");
    reject_unknown(f, "f_estimation",
                   {"window_m", "window_k", "bandwidth", "eval_grid_size"});
    cfg.f_estimation.window_m =
        get_field<int>(f, "f_estimation", "window_m", cfg.f_estimation.window_m);
    cfg.f_estimation.window_k =
        get_field<int>(f, "f_estimation", "window_k", cfg.f_estimation.window_k);
    cfg.f_estimation.bandwidth =
        get_field<double>(f, "f_estimation", "bandwidth", cfg.f_estimation.bandwidth);
    cfg.f_estimation.eval_grid_size =
        get_field<int>(f, "f_estimation", "eval_grid_size", cfg.f_estimation.eval_grid_size);
  }
  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    if (!s.is_object()) fail("sweep", "must be an object");
    reject_unknown(s, "sweep", {"a_list", "n_list", "alpha", "n_trials"});
    cfg.sweep.a_list = get_field<std::vector<double>>(s, "sweep", "a_list", {});
    cfg.sweep.n_list = get_field<std::vector<int>>(s, "sweep", "n_list", {});
    cfg.sweep.alpha = get_field<double>(s, "sweep", "alpha", cfg.sweep.alpha);
    cfg.sweep.n_trials = get_field<int>(s, "sweep", "n_trials", cfg.sweep.n_trials);
  }

  fill_defaults(cfg);
  validate_config(cfg);
  return cfg;
}

namespace {

json config_echo(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = kind_name(cfg.experiment);
  j["model"] = {{"a", cfg.model.a},
                {"sigma", cfg.model.sigma},
                {"state_trunc", cfg.model.state_trunc},
                {"state_grid_size", cfg.model.state_grid_size},
                {"obs_support", {cfg.model.y_lo, cfg.model.y_hi}}};
  j["quantizer"] = {{"strategy", strategy_name(cfg.quantizer.strategy)},
                    {"N", cfg.quantizer.n_cells},
                    {"N_list", cfg.quantizer.n_list}};
  j["mc"] = {{"path_len", cfg.mc.path_len},
             {"n_paths", cfg.mc.n_paths},
             {"seed", cfg.mc.seed},
             {"workers", cfg.mc.workers}};
  j["f_estimation"] = {{"window_m", cfg.f_estimation.window_m},
                       {"window_k", cfg.f_estimation.window_k},
                       {"bandwidth", cfg.f_estimation.bandwidth},
                       {"eval_grid_size", cfg.f_estimation.eval_grid_size}};
  j["sweep"] = {{"a_list", cfg.sweep.a_list},
                {"n_list", cfg.sweep.n_list},
                {"alpha", cfg.sweep.alpha},
                {"n_trials", cfg.sweep.n_trials}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

std::string sha256_hex(const unsigned char* data, std::size_t len) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  if (EVP_Digest(data, len, digest, &digest_len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest_len);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

// ---------- CSV plumbing ----------

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CsvWriter {
  std::string path;
  std::ofstream out;
  CsvWriter(const std::string& dir, const std::string& name,
            const std::vector<std::string>& comment_lines,
            const std::vector<std::string>& columns)
      : path((std::filesystem::path(dir) / name).string()), out(path, std::ios::binary) {
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out << (i ? "," : "") << columns[i];
    out << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  }
  void close() {
    out.close();
    if (!out) throw std::runtime_error("write failed for " + path);
  }
};

std::string a_label(double a) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", a);
  return buf;
}

// ---------- experiment bodies ----------

struct Context {
  const ExperimentConfig& cfg;
  std::string hash12;  // config-hash prefix carried on every row
  std::ostream& log;
};

std::vector<std::string> common_comments(const Context& ctx,
                                         const std::vector<std::string>& col_docs) {
  std::vector<std::string> lines;
  lines.push_back(std::string(kind_name(ctx.cfg.experiment)) + " output");
  for (const auto& d : col_docs) lines.push_back("col " + d);
  lines.push_back("col seed: master RNG seed for this run");
  lines.push_back("col config_hash: first 12 hex digits of the config digest");
  lines.push_back("seed: " + std::to_string(ctx.cfg.mc.seed));
  lines.push_back("config_hash: " + ctx.hash12);
  return lines;
}

// F estimate on the quadrature grid for the model at one a value.
FTable f_table_for(const ExperimentConfig& cfg, double a,
                   const std::vector<double>& grid, std::uint64_t seed) {
  ModelParams params = cfg.model;
  params.a = a;
  return estimate_F(params, cfg.mc.path_len, cfg.mc.n_paths, cfg.f_estimation.window_m,
                    cfg.f_estimation.window_k, cfg.f_estimation.bandwidth, grid, seed,
                    cfg.mc.workers);
}

std::vector<double> p0_table(const ModelParams& params, const std::vector<double>& grid) {
  std::vector<double> p0(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) p0[i] = normal_pdf(grid[i], params.sigma);
  return p0;
}

void run_fig1(const Context& ctx, RunOutputs& outputs) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::vector<double> grid =
      linspace(cfg.model.y_lo, cfg.model.y_hi, cfg.f_estimation.eval_grid_size);
  const std::vector<double> p0 = p0_table(cfg.model, grid);
  const PointDensity unif =
      density_uniform(cfg.model.y_lo, cfg.model.y_hi, cfg.f_estimation.eval_grid_size);
  const PointDensity iid = density_iid(cfg.model, cfg.f_estimation.eval_grid_size);
  for (std::size_t ai = 0; ai < cfg.sweep.a_list.size(); ++ai) {
    const double a = cfg.sweep.a_list[ai];
    const FTable f = f_table_for(cfg, a, grid, derive_seed(cfg.mc.seed, 1000 + ai));
    const PointDensity opt = density_optimal(grid, f.values, p0);
    CsvWriter csv(cfg.output_dir, "densities_a" + a_label(a) + ".csv",
                  common_comments(ctx, {"y: evaluation point",
                                        "zeta_uniform: uniform point density",
                                        "zeta_iid: i.i.d.-design point density",
                                        "zeta_optimal: exponent-optimal point density "
                                        "for a=" + a_label(a)}),
                  {"y", "zeta_uniform", "zeta_iid", "zeta_optimal", "seed", "config_hash"});
    for (std::size_t i = 0; i < grid.size(); ++i)
      csv.row({g17(grid[i]), g17(unif.values[i]), g17(iid.values[i]), g17(opt.values[i]),
               std::to_string(cfg.mc.seed), ctx.hash12});
    csv.close();
    outputs.files.push_back(csv.path);
    ctx.log << "densities written for a=" << a_label(a) << " (zeta_opt(0) = "
            << opt.values[grid.size() / 2] << ")\n";
  }
}

void run_fig2(const Context& ctx, RunOutputs& outputs) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::vector<double> grid =
      linspace(cfg.model.y_lo, cfg.model.y_hi, cfg.f_estimation.eval_grid_size);
  const std::vector<double> p0 = p0_table(cfg.model, grid);
  const PointDensity unif =
      density_uniform(cfg.model.y_lo, cfg.model.y_hi, cfg.f_estimation.eval_grid_size);
  const PointDensity iid = density_iid(cfg.model, cfg.f_estimation.eval_grid_size);
  CsvWriter csv(cfg.output_dir, "loss_vs_a.csv",
                common_comments(ctx, {"a: state correlation",
                                      "strategy: quantizer point-density design",
                                      "D: exponent loss (nats), or 'divergent'",
                                      "lower_bound: optimal-density bound on D"}),
                {"a", "strategy", "D", "lower_bound", "seed", "config_hash"});
  for (std::size_t ai = 0; ai < cfg.sweep.a_list.size(); ++ai) {
    const double a = cfg.sweep.a_list[ai];
    const FTable f = f_table_for(cfg, a, grid, derive_seed(cfg.mc.seed, 1000 + ai));
    const PointDensity opt = density_optimal(grid, f.values, p0);
    const double bound = lower_bound_D(f, p0);
    const auto emit = [&](const char* name, const PointDensity& zeta) {
      const DResult d = compute_D(zeta, f, p0);
      csv.row({g17(a), name, d.divergent ? "divergent" : g17(d.value), g17(bound),
               std::to_string(cfg.mc.seed), ctx.hash12});
    };
    emit("uniform", unif);
    emit("iid", iid);
    emit("optimal", opt);
    ctx.log << "a=" << a_label(a) << ": lower bound " << bound << "\n";
  }
  csv.close();
  outputs.files.push_back(csv.path);
}

PointDensity density_for_strategy(const ExperimentConfig& cfg,
                                  const std::vector<double>& grid) {
  switch (cfg.quantizer.strategy) {
    case QuantStrategy::uniform:
      return density_uniform(cfg.model.y_lo, cfg.model.y_hi,
                             cfg.f_estimation.eval_grid_size);
    case QuantStrategy::iid:
      return density_iid(cfg.model, cfg.f_estimation.eval_grid_size);
    case QuantStrategy::optimal: {
      const FTable f = f_table_for(cfg, cfg.model.a, grid, derive_seed(cfg.mc.seed, 999));
      return density_optimal(grid, f.values, p0_table(cfg.model, grid));
    }
    case QuantStrategy::none:
      break;
  }
  throw ConfigError("config error at quantizer.strategy: no density for 'none'");
}

void run_sweep(const Context& ctx, RunOutputs& outputs) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::vector<double> grid =
      linspace(cfg.model.y_lo, cfg.model.y_hi, cfg.f_estimation.eval_grid_size);
  const PointDensity density = density_for_strategy(cfg, grid);
  const StateGrid state_grid = build_state_grid(cfg.model);
  const std::vector<SweepRow> rows =
      convergence_sweep(cfg.model, state_grid, density, cfg.quantizer.n_list,
                        cfg.mc.path_len, cfg.mc.n_paths, cfg.mc.seed, cfg.mc.workers);
  CsvWriter csv(cfg.output_dir, "sweep.csv",
                common_comments(ctx, {"N: quantizer cells",
                                      "K_hat: unquantized exponent estimate",
                                      "K_se: its standard error",
                                      "KN_hat: quantized exponent estimate",
                                      "KN_se: its standard error",
                                      "scaled_gap: N^2 (K_hat - KN_hat)"}),
                {"N", "K_hat", "K_se", "KN_hat", "KN_se", "scaled_gap", "seed",
                 "config_hash"});
  for (const SweepRow& r : rows) {
    csv.row({std::to_string(r.n_cells), g17(r.k_hat), g17(r.k_se), g17(r.kn_hat),
             g17(r.kn_se), g17(r.scaled_gap), std::to_string(cfg.mc.seed), ctx.hash12});
    ctx.log << "N=" << r.n_cells << ": K_N = " << r.kn_hat << " +- " << r.kn_se
            << ", N^2 gap = " << r.scaled_gap << "\n";
  }
  csv.close();
  outputs.files.push_back(csv.path);
}

void run_np_test(const Context& ctx, RunOutputs& outputs) {
  const ExperimentConfig& cfg = ctx.cfg;
  std::vector<GapCheckRow> rows;
  if (cfg.quantizer.strategy == QuantStrategy::none) {
    const ModelParams params = cfg.model;
    const LlrFn fn = [params](std::span<const double> y) { return llr(y, params); };
    rows = np_slope_scan(fn, params, cfg.sweep.alpha, cfg.sweep.n_list,
                         cfg.sweep.n_trials, cfg.mc.seed, cfg.mc.workers);
    const ExponentEstimate k =
        estimate_K(cfg.model, cfg.mc.path_len, cfg.mc.n_paths, cfg.mc.seed, cfg.mc.workers);
    ctx.log << "K_hat = " << k.value << " +- " << k.std_error << "\n";
  } else {
    const std::vector<double> grid =
        linspace(cfg.model.y_lo, cfg.model.y_hi, cfg.f_estimation.eval_grid_size);
    const Quantizer q = build_quantizer(density_for_strategy(cfg, grid),
                                        cfg.quantizer.n_cells);
    const int n_min = *std::min_element(cfg.sweep.n_list.begin(), cfg.sweep.n_list.end());
    if (n_min < q.cells())
      ctx.log << "warning: n=" << n_min << " below N=" << q.cells()
              << "; the exponential approximation expects n >> N\n";
    rows = exponent_gap_check(q, cfg.model, cfg.sweep.alpha, cfg.sweep.n_list,
                              cfg.sweep.n_trials, cfg.mc.seed, cfg.mc.workers);
  }
  CsvWriter csv(cfg.output_dir, "np_test.csv",
                common_comments(ctx, {"n: block length",
                                      "alpha: false-alarm level",
                                      "threshold: calibrated LLR threshold",
                                      "miss_prob: estimated miss probability",
                                      "miss_se: binomial standard error",
                                      "slope: -(1/n) log miss_prob",
                                      "slope_se: delta-method standard error",
                                      "slope_kind: point, or upper_bound when no "
                                      "misses occurred (rule of three)"}),
                {"n", "alpha", "threshold", "miss_prob", "miss_se", "slope", "slope_se",
                 "slope_kind", "seed", "config_hash"});
  for (const GapCheckRow& r : rows) {
    csv.row({std::to_string(r.n), g17(ctx.cfg.sweep.alpha), g17(r.threshold),
             g17(r.miss), g17(r.miss_se), g17(r.slope), g17(r.slope_se),
             r.zero_miss ? "upper_bound" : "point", std::to_string(cfg.mc.seed),
             ctx.hash12});
    ctx.log << "n=" << r.n << ": slope " << (r.zero_miss ? "<= " : "= ") << r.slope
            << " (miss " << r.miss << ")\n";
  }
  csv.close();
  outputs.files.push_back(csv.path);
}

}  // namespace

std::string normalized_config_json(const ExperimentConfig& config) {
  return config_echo(config).dump(2);
}

std::string config_hash(const ExperimentConfig& config) {
  json j = config_echo(config);
  j.erase("output_dir");
  j["mc"].erase("workers");
  const std::string dump = j.dump();
  return sha256_hex(reinterpret_cast<const unsigned char*>(dump.data()), dump.size());
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  return sha256_hex(reinterpret_cast<const unsigned char*>(data.data()), data.size());
}

std::string emit_manifest(const ExperimentConfig& config, const RunOutputs& outputs) {
  json manifest;
  manifest["config"] = config_echo(config);
  manifest["config_hash"] = config_hash(config);
  manifest["seed"] = config.mc.seed;
  manifest["version"] = version;
  manifest["wall_time_s"] = outputs.wall_time_s;
  manifest["files"] = json::array();
  for (const std::string& f : outputs.files) {
    manifest["files"].push_back(
        {{"name", std::filesystem::path(f).filename().string()},
         {"sha256", sha256_file(f)},
         {"bytes", std::filesystem::file_size(f)}});
  }
  const std::string path =
      (std::filesystem::path(config.output_dir) / "manifest.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << manifest.dump(2) << "\n";
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path);
  return path;
}

RunOutputs run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.output_dir);
  Context ctx{config, config_hash(config).substr(0, 12), log};
  RunOutputs outputs;
  switch (config.experiment) {
    case ExperimentKind::fig1_densities: run_fig1(ctx, outputs); break;
    case ExperimentKind::fig2_loss_vs_a: run_fig2(ctx, outputs); break;
    case ExperimentKind::exponent_sweep: run_sweep(ctx, outputs); break;
    case ExperimentKind::np_test: run_np_test(ctx, outputs); break;
  }
  outputs.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string manifest = emit_manifest(config, outputs);
  log << "wrote " << outputs.files.size() << " data file(s) and " << manifest << "\n";
  return outputs;
}

}  // namespace hmq
