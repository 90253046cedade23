#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathways/analysis.hpp"
#include "pathways/pathway.hpp"

namespace pathways::orch {

struct ExperimentConfig {
  std::string dataset_path;
  std::string out_dir = ".";
  std::int64_t scenario_count = 64;
  std::int64_t seed_skip = 1;
  std::vector<opt::Mode> modes = {opt::Mode::perfect};
  std::vector<std::string> policies = {"baseline"};
  int workers = 1;
  opt::SolveConfig solve;
  analysis::CoverageBasis coverage_basis = analysis::CoverageBasis::all;
  double gradient_window = 1.0;
  // Failure-grid parameters; defaults are electrofuel availability 2045/2050.
  int heatmap_feature_a = 2;
  int heatmap_feature_b = 3;
  bool quiet = false;
};

struct DiscoverOptions {
  int max_leaves = 11;
  int max_unique_features = 5;
  int kfold = 5;
  std::uint32_t seed = 17;
  double prune_purity = 0.9;
  // Label perfect-feasible scenarios by whether the myopic run also
  // succeeded (the three-feature comparison analysis).
  bool compare_myopic_vs_perfect = false;
  std::string mode = "perfect";
  std::string policy = "baseline";
};

// Subcommand bodies; paths are written under config.out_dir.
std::string run_generate(const ExperimentConfig& config);
std::string run_evaluate(const ExperimentConfig& config, const std::string& matrix_path);
std::string run_label(const ExperimentConfig& config, const std::string& outcomes_path);
std::vector<std::string> run_discover(const ExperimentConfig& config,
                                      const std::string& outcomes_path,
                                      const std::string& matrix_path,
                                      const DiscoverOptions& options);
std::vector<std::string> run_report(const ExperimentConfig& config,
                                    const std::string& outcomes_path,
                                    const std::string& matrix_path);
std::string run_converge(const ExperimentConfig& config, const std::string& outcomes_path,
                         const std::vector<std::size_t>& checkpoints);

// Evaluates every (scenario, mode, policy) combination plus the no-event
// baseline row, in deterministic order regardless of worker count.
std::vector<opt::PathwayOutcome> evaluate_all(const ExperimentConfig& config,
                                              const std::vector<scen::ScenarioVector>& scenarios,
                                              double* c_base_out = nullptr);

// Full command-line interface; returns the process exit code
// (0 ok, 1 configuration error, 2 I/O error).
int run_cli(int argc, const char* const* argv);

}  // namespace pathways::orch
