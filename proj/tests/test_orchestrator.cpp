#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pathways/orchestrator.hpp"
#include "pathways/report.hpp"

using namespace pathways;
namespace fs = std::filesystem;

namespace {

const std::string kMiniBe = std::string(PATHWAYS_DATA_DIR) + "/mini_be.json";

std::string fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("pathways_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

orch::ExperimentConfig small_config(const std::string& dir) {
  orch::ExperimentConfig config;
  config.dataset_path = kMiniBe;
  config.out_dir = dir;
  config.scenario_count = 8;
  config.quiet = true;
  return config;
}

}  // namespace

TEST_CASE("generate writes a deterministic matrix on the discrete levels") {
  const std::string dir = fresh_dir("generate");
  auto config = small_config(dir);
  const std::string path = orch::run_generate(config);
  const std::string first = slurp(path);
  CHECK(orch::run_generate(config) == path);
  CHECK(slurp(path) == first);

  const auto scenarios = scen::read_scenario_file(path);
  REQUIRE(scenarios.size() == 8);
  for (const auto& s : scenarios) {
    for (int i = 0; i < scen::kNumParams; ++i) {
      CHECK(s[i] == scen::snap_to_level(i, s[i]));
    }
  }
  std::istringstream header(first);
  std::string line;
  std::getline(header, line);
  CHECK(line.rfind("scenario_id,p00,p01,", 0) == 0);
}

TEST_CASE("evaluate emits one row per combination plus the baseline, in order") {
  const std::string dir = fresh_dir("evaluate");
  auto config = small_config(dir);
  const std::string matrix = orch::run_generate(config);
  const std::string out = orch::run_evaluate(config, matrix);
  const auto outcomes = report::read_outcomes_file(out);
  REQUIRE(outcomes.size() == 9);  // 8 scenarios + no-event baseline
  CHECK(outcomes[0].scenario_id == 0);
  CHECK(outcomes[0].feasible());
  CHECK(outcomes[0].cost_normalized == doctest::Approx(100.0).epsilon(1e-9));
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    CHECK(outcomes[i].scenario_id == std::int64_t(i));
    CHECK(outcomes[i].mode == opt::Mode::perfect);
  }
}

TEST_CASE("worker counts one and eight give byte-identical outcomes") {
  const std::string dir1 = fresh_dir("workers1");
  const std::string dir8 = fresh_dir("workers8");
  auto c1 = small_config(dir1);
  c1.scenario_count = 6;
  c1.modes = {opt::Mode::perfect, opt::Mode::myopic};
  c1.workers = 1;
  auto c8 = c1;
  c8.out_dir = dir8;
  c8.workers = 8;
  const std::string m1 = orch::run_generate(c1);
  const std::string m8 = orch::run_generate(c8);
  CHECK(slurp(m1) == slurp(m8));
  const std::string o1 = orch::run_evaluate(c1, m1);
  const std::string o8 = orch::run_evaluate(c8, m8);
  CHECK(slurp(o1) == slurp(o8));
}

TEST_CASE("outcome jsonl round-trips") {
  const std::string dir = fresh_dir("roundtrip");
  auto config = small_config(dir);
  config.scenario_count = 2;
  const std::string matrix = orch::run_generate(config);
  const std::string out = orch::run_evaluate(config, matrix);
  const auto outcomes = report::read_outcomes_file(out);
  std::ostringstream rewritten;
  for (const auto& o : outcomes) rewritten << report::outcome_jsonl(o) << "\n";
  CHECK(rewritten.str() == slurp(out));
}

TEST_CASE("myopic-feasible scenarios are a subset of perfect-feasible ones") {
  const std::string dir = fresh_dir("nesting");
  auto config = small_config(dir);
  config.scenario_count = 10;
  config.modes = {opt::Mode::perfect, opt::Mode::myopic};
  const std::string matrix = orch::run_generate(config);
  const auto outcomes = report::read_outcomes_file(orch::run_evaluate(config, matrix));
  std::set<std::int64_t> perfect_ok, myopic_ok;
  for (const auto& o : outcomes) {
    if (o.scenario_id == 0 || !o.feasible()) continue;
    (o.mode == opt::Mode::perfect ? perfect_ok : myopic_ok).insert(o.scenario_id);
  }
  for (std::int64_t id : myopic_ok) CHECK(perfect_ok.count(id) == 1);
}

namespace {

// Synthetic outcome file: failure exactly when p03 is at its maximum.
std::pair<std::string, std::string> synthetic_discover_inputs(const std::string& dir,
                                                              bool all_success) {
  const auto scenarios = scen::generate_scenarios(48, 1);
  const std::string matrix = dir + "/scenarios.csv";
  scen::write_scenario_file(matrix, scenarios);
  std::ostringstream buf;
  opt::PathwayOutcome base;
  base.scenario_id = 0;
  base.status = opt::PathwayOutcome::Status::feasible;
  base.total_cost = 1000.0;
  base.cost_normalized = 100.0;
  buf << report::outcome_jsonl(base) << "\n";
  for (const auto& s : scenarios) {
    opt::PathwayOutcome o;
    o.scenario_id = s.scenario_id;
    const bool fail = !all_success && s[3] == 1.0;
    o.status = fail ? opt::PathwayOutcome::Status::infeasible
                    : opt::PathwayOutcome::Status::feasible;
    if (!fail) {
      o.total_cost = 1000.0 + s[0];  // mild spread, no excessive-cost tail
      o.cost_normalized = o.total_cost / 10.0;
    }
    buf << report::outcome_jsonl(o) << "\n";
  }
  const std::string outcomes = dir + "/outcomes.jsonl";
  report::write_file(outcomes, buf.str());
  return {outcomes, matrix};
}

}  // namespace

TEST_CASE("discover isolates the constructed dealbreaker at the root") {
  const std::string dir = fresh_dir("discover");
  auto config = small_config(dir);
  orch::DiscoverOptions options;
  options.max_leaves = 4;
  options.kfold = 4;
  const auto [outcomes, matrix] = synthetic_discover_inputs(dir, false);
  const auto written = orch::run_discover(config, outcomes, matrix, options);
  REQUIRE(!written.empty());
  const std::string tree_txt = slurp(dir + "/tree.txt");
  CHECK(tree_txt.rfind("p03 <= 0.9", 0) == 0);  // root split between 0.8 and 1.0
  const std::string summary = slurp(dir + "/discover_summary.csv");
  CHECK(summary.find("\n48,") != std::string::npos);
  const std::string importances = slurp(dir + "/importances.csv");
  CHECK(importances.find("p03,1") != std::string::npos);
  const std::string scores = slurp(dir + "/tree_scores.csv");
  CHECK(scores.find("leaves,") == 0);
  // Coverage 1.0 at two leaves: the constructed rule is a single split.
  CHECK(scores.find("2,1,1,1,1") != std::string::npos);
}

TEST_CASE("discover reports degeneracy on all-success outcomes") {
  const std::string dir = fresh_dir("degenerate");
  auto config = small_config(dir);
  orch::DiscoverOptions options;
  options.max_leaves = 4;
  options.kfold = 4;
  const auto [outcomes, matrix] = synthetic_discover_inputs(dir, true);
  orch::run_discover(config, outcomes, matrix, options);
  const std::string summary = slurp(dir + "/discover_summary.csv");
  CHECK(summary.find("degenerate labels") != std::string::npos);
  const std::string tree_txt = slurp(dir + "/tree.txt");
  CHECK(tree_txt.rfind("leaf:", 0) == 0);  // single leaf
}

TEST_CASE("report emits one curve per group plus a summary, byte-stable") {
  const std::string dir = fresh_dir("report");
  auto config = small_config(dir);
  config.scenario_count = 6;
  config.policies = {"baseline", "delay_renewables"};
  const std::string matrix = orch::run_generate(config);
  const std::string outcomes = orch::run_evaluate(config, matrix);
  const auto written = orch::run_report(config, outcomes, matrix);
  CHECK(fs::exists(dir + "/curve_perfect_baseline.csv"));
  CHECK(fs::exists(dir + "/curve_perfect_delay_renewables.csv"));
  CHECK(fs::exists(dir + "/curve_perfect_baseline.svg"));
  CHECK(fs::exists(dir + "/heatmap_perfect_baseline.csv"));
  CHECK(fs::exists(dir + "/summary.csv"));
  const std::string summary = slurp(dir + "/summary.csv");
  CHECK(summary.find("perfect,baseline,6,") != std::string::npos);
  CHECK(summary.find("perfect,delay_renewables,6,") != std::string::npos);

  std::map<std::string, std::string> before;
  for (const auto& p : written) before[p] = slurp(p);
  const auto rewritten = orch::run_report(config, outcomes, matrix);
  CHECK(rewritten == written);
  for (const auto& p : rewritten) CHECK(slurp(p) == before.at(p));
}

TEST_CASE("label writes one labeled row per scenario outcome") {
  const std::string dir = fresh_dir("label");
  auto config = small_config(dir);
  config.scenario_count = 5;
  const std::string matrix = orch::run_generate(config);
  const std::string outcomes = orch::run_evaluate(config, matrix);
  const std::string labels_path = orch::run_label(config, outcomes);
  const std::string labels = slurp(labels_path);
  CHECK(std::count(labels.begin(), labels.end(), '\n') == 6);  // header + 5 rows
  CHECK(labels.find("scenario_id,mode,policy,status,cost_normalized,label") == 0);
}

TEST_CASE("converge recomputes prefix metrics") {
  const std::string dir = fresh_dir("converge");
  auto config = small_config(dir);
  config.scenario_count = 8;
  const std::string matrix = orch::run_generate(config);
  const std::string outcomes = orch::run_evaluate(config, matrix);
  const std::string path = orch::run_converge(config, outcomes, {4, 8});
  const std::string csv = slurp(path);
  CHECK(csv.find("mode,policy,checkpoint,") == 0);
  CHECK(csv.find("perfect,baseline,4,") != std::string::npos);
  CHECK(csv.find("perfect,baseline,8,") != std::string::npos);
}

TEST_CASE("cli exit codes distinguish config and io errors") {
  const std::string dir = fresh_dir("cli");
  {
    const char* argv[] = {"pathways", "no-such-command"};
    CHECK(orch::run_cli(2, argv) == 1);
  }
  {
    const char* argv[] = {"pathways", "label", "--outcomes", "/nonexistent.jsonl", "--out",
                          dir.c_str(), "--quiet"};
    CHECK(orch::run_cli(7, argv) == 2);
  }
  {
    const std::string matrix = dir + "/scenarios.csv";
    scen::write_scenario_file(matrix, scen::generate_scenarios(2, 1));
    const char* argv[] = {"pathways",  "evaluate", "--dataset", kMiniBe.c_str(),
                          "--matrix",  matrix.c_str(), "--out", dir.c_str(),
                          "--policies", "not_a_policy", "--quiet"};
    CHECK(orch::run_cli(11, argv) == 1);
  }
  {
    const char* argv[] = {"pathways", "generate", "--dataset", kMiniBe.c_str(),
                          "-n",       "4",        "--out",     dir.c_str(),
                          "--quiet"};
    CHECK(orch::run_cli(9, argv) == 0);
    CHECK(fs::exists(dir + "/scenarios.csv"));
  }
}
