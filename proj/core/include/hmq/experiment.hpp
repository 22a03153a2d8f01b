// Declarative experiment runner: JSON config in, CSV tables + JSON manifest out.
#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmq/model.hpp"

namespace hmq {

enum class ExperimentKind { fig1_densities, fig2_loss_vs_a, exponent_sweep, np_test };
enum class QuantStrategy { none, uniform, iid, optimal };

struct QuantizerConfig {
  QuantStrategy strategy = QuantStrategy::optimal;
  int n_cells = 64;
  std::vector<int> n_list;  // for exponent_sweep
};

struct McConfig {
  int path_len = 20000;
  int n_paths = 32;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: HMQ_WORKERS env or hardware concurrency
};

struct FEstimationConfig {
  int window_m = 30;
  int window_k = 30;
  double bandwidth = 0.0;  // <= 0: automatic
  int eval_grid_size = 4097;
};

// Experiment-specific knobs; empty lists are filled with per-experiment defaults.
struct SweepConfig {
  std::vector<double> a_list;
  std::vector<int> n_list;
  double alpha = 0.1;
  int n_trials = 20000;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::fig1_densities;
  ModelParams model;
  QuantizerConfig quantizer;
  McConfig mc;
  FEstimationConfig f_estimation;
  SweepConfig sweep;
  std::string output_dir = "out";
};

// Config problems carry a field-path diagnostic (e.g. "model.sigma").
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::string& json_text);

// Canonical JSON echo of a parsed config (stable key order and formatting).
std::string normalized_config_json(const ExperimentConfig& config);

// SHA-256 of the canonical echo with output_dir and mc.workers removed, so the
// hash identifies the science, not the execution layout.
std::string config_hash(const ExperimentConfig& config);

struct RunOutputs {
  std::vector<std::string> files;  // paths of the CSVs written
  double wall_time_s = 0.0;
};

// Dispatches to the configured experiment; writes CSVs into output_dir, then a
// manifest, logging a human-readable summary. Throws ConfigError for
// invalid configs and std::runtime_error for I/O failures.
RunOutputs run_experiment(const ExperimentConfig& config, std::ostream& log);

// Writes manifest.json (config echo, seed, version, wall time, per-file
// digests); returns the manifest path.
std::string emit_manifest(const ExperimentConfig& config, const RunOutputs& outputs);

std::string sha256_file(const std::string& path);

}  // namespace hmq
