// hmq-detect: quantizer design and error-exponent experiments for the
// Gauss-Markov detection model.
#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hmq/experiment.hpp"
#include "hmq/version.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& output_dir,
                bool has_seed, std::uint64_t seed, int workers) {
  std::string text;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config file " << config_path << "\n";
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  hmq::ExperimentConfig config;
  try {
    config = hmq::parse_config(text);
  } catch (const hmq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!output_dir.empty()) config.output_dir = output_dir;
  if (has_seed) config.mc.seed = seed;
  if (workers >= 0) config.mc.workers = workers;
  try {
    hmq::run_experiment(config, std::cout);
  } catch (const hmq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantizer design and error-exponent experiments"};
  app.set_version_flag("--version", hmq::version);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  int workers = -1;  // -1: keep the config value
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--output-dir", output_dir, "override the config output directory");
  auto* seed_opt = run->add_option("--seed", seed, "override the master RNG seed");
  run->add_option("--workers", workers, "worker threads (0 = auto)")
      ->envname("HMQ_WORKERS");

  CLI11_PARSE(app, argc, argv);
  return run_command(config_path, output_dir, static_cast<bool>(*seed_opt), seed,
                     workers);
}
