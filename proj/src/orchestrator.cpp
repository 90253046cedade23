#include "pathways/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "pathways/report.hpp"

namespace pathways::orch {

namespace fs = std::filesystem;

namespace {

struct Task {
  scen::ScenarioVector vector;
  opt::Mode mode;
  std::string policy;
};

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Group {
  opt::Mode mode;
  std::string policy;
  std::vector<opt::PathwayOutcome> outcomes;  // scenario rows only, file order
  std::vector<std::size_t> file_index;
};

// Scenario rows grouped by (mode, policy) in order of first appearance; the
// id-0 baseline row is kept aside as the normalization anchor.
struct GroupedOutcomes {
  double c_base = 0.0;
  std::vector<Group> groups;
};

GroupedOutcomes group_outcomes(const std::vector<opt::PathwayOutcome>& outcomes) {
  GroupedOutcomes g;
  bool have_base = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.scenario_id == 0) {
      if (o.feasible()) {
        g.c_base = o.total_cost;
        have_base = true;
      }
      continue;
    }
    Group* grp = nullptr;
    for (auto& cand : g.groups) {
      if (cand.mode == o.mode && cand.policy == o.policy) {
        grp = &cand;
        break;
      }
    }
    if (!grp) {
      g.groups.push_back({o.mode, o.policy, {}, {}});
      grp = &g.groups.back();
    }
    grp->outcomes.push_back(o);
    grp->file_index.push_back(i);
  }
  if (!have_base) {
    throw std::runtime_error("outcomes file has no feasible no-event baseline row (scenario_id 0)");
  }
  return g;
}

std::map<std::int64_t, scen::ScenarioVector> vector_index(
    const std::vector<scen::ScenarioVector>& scenarios) {
  std::map<std::int64_t, scen::ScenarioVector> out;
  for (const auto& v : scenarios) out[v.scenario_id] = v;
  return out;
}

std::string group_tag(const Group& g) { return opt::to_string(g.mode) + "_" + g.policy; }

}  // namespace

std::vector<opt::PathwayOutcome> evaluate_all(const ExperimentConfig& config,
                                              const std::vector<scen::ScenarioVector>& scenarios,
                                              double* c_base_out) {
  const model::EnergySystemDataset ds = model::load_dataset(config.dataset_path);
  std::map<std::string, opt::Policy> policies;
  for (const auto& name : config.policies) policies[name] = opt::apply_policy(name, ds);
  const opt::Policy baseline = opt::apply_policy("baseline", ds);

  const auto t0 = std::chrono::steady_clock::now();
  opt::PathwayOutcome base =
      opt::solve_perfect_foresight(ds, scen::EventSchedule::identity(), baseline, config.solve);
  base.scenario_id = 0;
  if (!base.feasible()) {
    throw std::runtime_error("no-event perfect-foresight baseline is infeasible; check dataset");
  }
  const double c_base = base.total_cost;
  opt::normalize_outcome(base, c_base);
  if (c_base_out) *c_base_out = c_base;
  if (!config.quiet) {
    std::cerr << "baseline: cost " << report::num(c_base) << " (" << elapsed_s(t0) << " s)\n";
  }

  std::vector<Task> tasks;
  for (const auto& v : scenarios) {
    for (const auto mode : config.modes) {
      for (const auto& policy : config.policies) tasks.push_back({v, mode, policy});
    }
  }

  std::vector<opt::PathwayOutcome> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      const auto ts = std::chrono::steady_clock::now();
      opt::PathwayOutcome out;
      try {
        const scen::EventSchedule schedule = scen::build_schedule(task.vector);
        const opt::Policy& policy = policies.at(task.policy);
        out = task.mode == opt::Mode::perfect
                  ? opt::solve_perfect_foresight(ds, schedule, policy, config.solve)
                  : opt::solve_myopic(ds, schedule, policy, config.solve);
      } catch (const std::exception& e) {
        out.status = opt::PathwayOutcome::Status::error;
        out.mode = task.mode;
        out.policy = task.policy;
        out.message = e.what();
      }
      out.scenario_id = task.vector.scenario_id;
      opt::normalize_outcome(out, c_base);
      results[i] = std::move(out);
      if (!config.quiet) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "scenario " << task.vector.scenario_id << " " << opt::to_string(task.mode)
                  << " " << task.policy << ": "
                  << (results[i].feasible()
                          ? "feasible cost " + report::num(results[i].total_cost)
                          : (results[i].status == opt::PathwayOutcome::Status::infeasible
                                 ? "infeasible"
                                 : "error"))
                  << " (" << elapsed_s(ts) << " s)\n";
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(config.workers, int(tasks.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<opt::PathwayOutcome> ordered;
  ordered.reserve(results.size() + 1);
  ordered.push_back(std::move(base));
  for (auto& r : results) ordered.push_back(std::move(r));
  return ordered;
}

std::string run_generate(const ExperimentConfig& config) {
  if (config.scenario_count < 1) throw std::invalid_argument("scenario count must be >= 1");
  fs::create_directories(config.out_dir);
  const auto scenarios = scen::generate_scenarios(config.scenario_count, config.seed_skip);
  const std::string path = join_path(config.out_dir, "scenarios.csv");
  scen::write_scenario_file(path, scenarios);
  return path;
}

std::string run_evaluate(const ExperimentConfig& config, const std::string& matrix_path) {
  fs::create_directories(config.out_dir);
  const auto scenarios = scen::read_scenario_file(matrix_path);
  const auto outcomes = evaluate_all(config, scenarios);
  std::ostringstream buf;
  for (const auto& o : outcomes) buf << report::outcome_jsonl(o) << "\n";
  const std::string path = join_path(config.out_dir, "outcomes.jsonl");
  report::write_file(path, buf.str());
  return path;
}

std::string run_label(const ExperimentConfig& config, const std::string& outcomes_path) {
  fs::create_directories(config.out_dir);
  const auto outcomes = report::read_outcomes_file(outcomes_path);
  const GroupedOutcomes grouped = group_outcomes(outcomes);
  std::ostringstream buf;
  buf << "scenario_id,mode,policy,status,cost_normalized,label\n";
  for (const auto& g : grouped.groups) {
    const auto curve =
        analysis::cost_curve(g.outcomes, grouped.c_base, config.coverage_basis,
                             config.gradient_window);
    const auto cutoff = analysis::excessive_cost_cutoff(curve);
    const auto labels = analysis::label_outcomes(g.outcomes, curve, cutoff);
    const std::string body = report::labels_csv(g.outcomes, labels);
    buf << body.substr(body.find('\n') + 1);
  }
  const std::string path = join_path(config.out_dir, "labels.csv");
  report::write_file(path, buf.str());
  return path;
}

namespace {

std::vector<analysis::Label> group_labels(const Group& g, double c_base,
                                          const ExperimentConfig& config) {
  const auto curve =
      analysis::cost_curve(g.outcomes, c_base, config.coverage_basis, config.gradient_window);
  const auto cutoff = analysis::excessive_cost_cutoff(curve);
  return analysis::label_outcomes(g.outcomes, curve, cutoff);
}

const Group* find_group(const GroupedOutcomes& grouped, opt::Mode mode, const std::string& policy) {
  for (const auto& g : grouped.groups) {
    if (g.mode == mode && g.policy == policy) return &g;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> run_discover(const ExperimentConfig& config,
                                      const std::string& outcomes_path,
                                      const std::string& matrix_path,
                                      const DiscoverOptions& options) {
  fs::create_directories(config.out_dir);
  const auto outcomes = report::read_outcomes_file(outcomes_path);
  const auto scenarios = scen::read_scenario_file(matrix_path);
  const auto by_id = vector_index(scenarios);
  const GroupedOutcomes grouped = group_outcomes(outcomes);

  const opt::Mode mode = options.mode == "myopic" ? opt::Mode::myopic : opt::Mode::perfect;
  std::vector<scen::ScenarioVector> rows;
  std::vector<int> labels;
  std::string note;

  if (options.compare_myopic_vs_perfect) {
    const Group* perfect = find_group(grouped, opt::Mode::perfect, options.policy);
    const Group* myopic = find_group(grouped, opt::Mode::myopic, options.policy);
    if (!perfect || !myopic) {
      throw std::invalid_argument("comparison needs both perfect and myopic outcomes for policy " +
                                  options.policy);
    }
    const auto perfect_labels = group_labels(*perfect, grouped.c_base, config);
    const auto myopic_labels = group_labels(*myopic, grouped.c_base, config);
    std::map<std::int64_t, analysis::Label> myopic_by_id;
    for (std::size_t i = 0; i < myopic->outcomes.size(); ++i) {
      myopic_by_id[myopic->outcomes[i].scenario_id] = myopic_labels[i];
    }
    for (std::size_t i = 0; i < perfect->outcomes.size(); ++i) {
      if (perfect_labels[i] != analysis::Label::success) continue;
      const std::int64_t id = perfect->outcomes[i].scenario_id;
      auto vit = by_id.find(id);
      auto mit = myopic_by_id.find(id);
      if (vit == by_id.end() || mit == myopic_by_id.end()) continue;
      rows.push_back(vit->second);
      labels.push_back(mit->second == analysis::Label::success ? cart::kSuccess : cart::kFailure);
    }
    note = "labels: perfect-successful scenarios, failure = myopic run failed";
  } else {
    const Group* g = find_group(grouped, mode, options.policy);
    if (!g) {
      throw std::invalid_argument("no outcomes for mode " + options.mode + ", policy " +
                                  options.policy);
    }
    const auto ls = group_labels(*g, grouped.c_base, config);
    for (std::size_t i = 0; i < g->outcomes.size(); ++i) {
      auto vit = by_id.find(g->outcomes[i].scenario_id);
      if (vit == by_id.end()) continue;
      rows.push_back(vit->second);
      labels.push_back(ls[i] == analysis::Label::success ? cart::kSuccess : cart::kFailure);
    }
  }
  if (rows.empty()) throw std::invalid_argument("discover: no labelable scenarios");

  const int n_failure = int(std::count(labels.begin(), labels.end(), cart::kFailure));
  if (n_failure == 0 || n_failure == int(labels.size())) {
    note = "degenerate labels: every scenario is " +
           std::string(n_failure == 0 ? "success" : "failure") + "; single-leaf tree";
  }

  const cart::LabeledDataset ds = cart::make_labeled_dataset(rows, labels);
  const cart::ClassificationTree tree =
      cart::fit_tree(ds, options.max_leaves, options.max_unique_features);
  const cart::TreeScores sc = cart::scores(tree, ds);
  const cart::PrunedView pruned = cart::prune_failure_paths(tree, options.prune_purity);
  const auto importances = cart::feature_importances(tree);

  // Leaf sweep: scores as the leaf budget grows, the model-selection table.
  std::vector<std::array<double, 5>> sweep;
  for (int leaves = 2; leaves <= options.max_leaves; ++leaves) {
    const auto t = cart::fit_tree(ds, leaves, options.max_unique_features);
    const auto s = cart::scores(t, ds);
    const double cv = int(ds.size()) >= options.kfold
                          ? cart::kfold_cv(ds, options.kfold, leaves,
                                           options.max_unique_features, options.seed)
                          : 0.0;
    sweep.push_back({double(t.leaf_count()), double(t.unique_features().size()),
                     s.interpretability, s.coverage, cv});
  }

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = join_path(config.out_dir, name);
    report::write_file(path, content);
    written.push_back(path);
  };
  emit("tree.json", cart::export_tree_json(tree, &pruned));
  emit("tree.txt", cart::render_text(tree));
  emit("tree_pruned.txt", cart::render_text(tree, pruned));
  emit("tree_scores.csv", report::tree_scores_csv(sweep));
  {
    std::ostringstream buf;
    buf << "feature,importance\n";
    for (const auto& [name, v] : importances) buf << name << "," << report::num(v) << "\n";
    emit("importances.csv", buf.str());
  }
  {
    std::ostringstream buf;
    buf << "rows,failures,leaves,unique_features,interpretability,coverage,cv_coverage,note\n";
    const double cv = int(ds.size()) >= options.kfold
                          ? cart::kfold_cv(ds, options.kfold, options.max_leaves,
                                           options.max_unique_features, options.seed)
                          : 0.0;
    buf << ds.size() << "," << n_failure << "," << tree.leaf_count() << ","
        << tree.unique_features().size() << "," << report::num(sc.interpretability) << ","
        << report::num(sc.coverage) << "," << report::num(cv) << "," << note << "\n";
    emit("discover_summary.csv", buf.str());
  }
  return written;
}

std::vector<std::string> run_report(const ExperimentConfig& config,
                                    const std::string& outcomes_path,
                                    const std::string& matrix_path) {
  fs::create_directories(config.out_dir);
  const auto outcomes = report::read_outcomes_file(outcomes_path);
  const auto scenarios = scen::read_scenario_file(matrix_path);
  const auto by_id = vector_index(scenarios);
  const GroupedOutcomes grouped = group_outcomes(outcomes);

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = join_path(config.out_dir, name);
    report::write_file(path, content);
    written.push_back(path);
  };

  std::ostringstream summary;
  summary << "mode,policy,scenarios,feasible,success_share,cutoff_coverage_pct,cutoff_cost_pct,"
             "auc,c_base\n";

  for (const auto& g : grouped.groups) {
    const std::string tag = group_tag(g);
    const auto curve =
        analysis::cost_curve(g.outcomes, grouped.c_base, config.coverage_basis,
                             config.gradient_window);
    const auto cutoff = analysis::excessive_cost_cutoff(curve);
    const auto labels = analysis::label_outcomes(g.outcomes, curve, cutoff);
    emit("curve_" + tag + ".csv", report::curve_csv(curve, g.outcomes, cutoff));
    emit("curve_" + tag + ".svg",
         report::curve_svg(curve, cutoff, "cumulative transition cost: " + tag));

    // Failure grid over the two electrofuel availability parameters.
    std::vector<scen::ScenarioVector> vecs;
    std::vector<analysis::Label> vls;
    for (std::size_t i = 0; i < g.outcomes.size(); ++i) {
      auto vit = by_id.find(g.outcomes[i].scenario_id);
      if (vit == by_id.end()) continue;
      vecs.push_back(vit->second);
      vls.push_back(labels[i]);
    }
    if (!vecs.empty()) {
      const auto hm = analysis::failure_heatmap(vecs, vls, config.heatmap_feature_a,
                                                config.heatmap_feature_b);
      const std::string hm_title = "failure share: " + scen::param_label(hm.feature_a) + " vs " +
                                   scen::param_label(hm.feature_b);
      emit("heatmap_" + tag + ".csv", report::heatmap_csv(hm));
      emit("heatmap_" + tag + ".svg", report::heatmap_svg(hm, hm_title));
    }

    // Correlations between capacity decisions across feasible scenarios.
    for (int year : scen::kImpactYears) {
      std::vector<std::string> names;
      std::vector<std::vector<double>> cols;
      std::set<std::string> techs;
      for (const auto& o : g.outcomes) {
        if (!o.feasible()) continue;
        for (const auto& [tech, _] : o.capacities) techs.insert(tech);
      }
      for (const auto& tech : techs) {
        names.push_back(tech + "_" + std::to_string(year));
        std::vector<double> col;
        for (const auto& o : g.outcomes) {
          if (!o.feasible()) continue;
          col.push_back(o.capacities.at(tech).at(year));
        }
        cols.push_back(std::move(col));
      }
      if (cols.empty() || cols[0].size() < 2) continue;
      const auto cm = analysis::correlation_matrix(names, cols, 0.6);
      const std::string cm_tag = "correlation_" + std::to_string(year) + "_" + tag;
      emit(cm_tag + ".csv", report::correlation_csv(cm));
      emit(cm_tag + ".svg", report::correlation_svg(
                                cm, "capacity correlations " + std::to_string(year) + ": " + tag));
    }

    // Convergence on evenly spaced prefixes.
    const std::size_t n = g.outcomes.size();
    std::vector<std::size_t> checkpoints;
    const std::size_t step = std::max<std::size_t>(1, n / 10);
    for (std::size_t c = step; c < n; c += step) checkpoints.push_back(c);
    checkpoints.push_back(n);
    std::vector<std::size_t> usable;
    for (std::size_t c : checkpoints) {
      std::size_t feasible = 0;
      for (std::size_t i = 0; i < c; ++i) feasible += g.outcomes[i].feasible() ? 1 : 0;
      if (feasible >= 2) usable.push_back(c);
    }
    if (!usable.empty()) {
      const auto conv = analysis::convergence_report(g.outcomes, usable, grouped.c_base,
                                                     config.coverage_basis,
                                                     config.gradient_window);
      emit("convergence_" + tag + ".csv", report::convergence_csv(conv));
      emit("convergence_" + tag + ".svg",
           report::convergence_svg(conv, "convergence: " + tag));
    }

    double feasible = 0;
    for (const auto& o : g.outcomes) feasible += o.feasible() ? 1 : 0;
    summary << opt::to_string(g.mode) << "," << g.policy << "," << g.outcomes.size() << ","
            << int(feasible) << "," << report::num(analysis::success_proportion(labels)) << ",";
    if (cutoff.coverage) summary << report::num(*cutoff.coverage);
    summary << ",";
    if (cutoff.cost) summary << report::num(*cutoff.cost);
    summary << "," << report::num(analysis::auc(curve)) << "," << report::num(grouped.c_base)
            << "\n";
  }
  emit("summary.csv", summary.str());
  return written;
}

std::string run_converge(const ExperimentConfig& config, const std::string& outcomes_path,
                         const std::vector<std::size_t>& checkpoints) {
  fs::create_directories(config.out_dir);
  const auto outcomes = report::read_outcomes_file(outcomes_path);
  const GroupedOutcomes grouped = group_outcomes(outcomes);
  std::ostringstream buf;
  buf << "mode,policy,checkpoint,success_proportion,auc,stable_from_here\n";
  for (const auto& g : grouped.groups) {
    const auto conv = analysis::convergence_report(g.outcomes, checkpoints, grouped.c_base,
                                                   config.coverage_basis, config.gradient_window);
    for (const auto& r : conv.rows) {
      buf << opt::to_string(g.mode) << "," << g.policy << "," << r.checkpoint << ","
          << report::num(r.success_proportion) << "," << report::num(r.auc) << ","
          << (r.stable_from_here ? 1 : 0) << "\n";
    }
  }
  const std::string path = join_path(config.out_dir, "convergence.csv");
  report::write_file(path, buf.str());
  return path;
}

namespace {

std::vector<opt::Mode> parse_modes(const std::string& s) {
  if (s == "perfect") return {opt::Mode::perfect};
  if (s == "myopic") return {opt::Mode::myopic};
  if (s == "both") return {opt::Mode::perfect, opt::Mode::myopic};
  throw std::invalid_argument("mode must be perfect, myopic or both");
}

int default_workers() {
  if (const char* env = std::getenv("PATHWAYS_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"unexpected-event robustness toolkit for multi-phase energy-transition models"};
  app.require_subcommand(1);

  ExperimentConfig config;
  config.workers = default_workers();
  std::string modes_str = "perfect";
  std::string matrix_path, outcomes_path;
  DiscoverOptions discover;
  std::vector<std::size_t> checkpoints;
  std::string basis_str = "all";
  std::string lp_out = "lp.json";
  std::string lp_policy = "baseline";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_flag("--quiet", config.quiet, "suppress progress logging");
  };

  CLI::App* generate = app.add_subcommand("generate", "sample the unexpected-event space");
  generate->add_option("--dataset", config.dataset_path, "dataset file");
  generate->add_option("-n,--scenarios", config.scenario_count, "number of scenarios");
  generate->add_option("--seed-skip", config.seed_skip, "points of the Sobol sequence to skip");
  add_common(generate);

  CLI::App* evaluate = app.add_subcommand("evaluate", "solve every (scenario, mode, policy)");
  evaluate->add_option("--dataset", config.dataset_path, "dataset file")->required();
  evaluate->add_option("--matrix", matrix_path, "scenario matrix csv")->required();
  evaluate->add_option("--modes", modes_str, "perfect, myopic or both");
  evaluate->add_option("--policies", config.policies, "policy names")->delimiter(',');
  evaluate->add_option("--workers", config.workers, "parallel evaluations");
  evaluate->add_option("--lookahead", config.solve.lookahead_phases, "myopic window phases");
  evaluate->add_option("--lp-tol", config.solve.lp_tol, "lp tolerance");
  evaluate->add_option("--discount-rate", config.solve.discount_rate, "annual discount rate");
  evaluate->add_flag("--salvage-linear", config.solve.salvage_linear,
                     "credit capex beyond the horizon");
  add_common(evaluate);

  CLI::App* label = app.add_subcommand("label", "success/failure labels per outcome");
  label->add_option("--outcomes", outcomes_path, "outcomes jsonl")->required();
  label->add_option("--coverage-basis", basis_str, "all or feasible");
  label->add_option("--gradient-window", config.gradient_window, "cutoff window, %abs coverage");
  add_common(label);

  CLI::App* discover_cmd = app.add_subcommand("discover", "classification-tree scenario discovery");
  discover_cmd->add_option("--outcomes", outcomes_path, "outcomes jsonl")->required();
  discover_cmd->add_option("--matrix", matrix_path, "scenario matrix csv")->required();
  discover_cmd->add_option("--max-leaves", discover.max_leaves, "leaf budget");
  discover_cmd->add_option("--max-unique-features", discover.max_unique_features,
                           "unique feature budget");
  discover_cmd->add_option("--kfold", discover.kfold, "cross-validation folds");
  discover_cmd->add_option("--seed", discover.seed, "cross-validation shuffle seed");
  discover_cmd->add_option("--prune-purity", discover.prune_purity,
                           "failure share to keep a display leaf");
  discover_cmd->add_option("--mode", discover.mode, "perfect or myopic");
  discover_cmd->add_option("--policy", discover.policy, "policy to analyze");
  discover_cmd->add_flag("--compare", discover.compare_myopic_vs_perfect,
                         "label perfect-successful scenarios by myopic failure");
  discover_cmd->add_option("--coverage-basis", basis_str, "all or feasible");
  discover_cmd->add_option("--gradient-window", config.gradient_window, "cutoff window");
  add_common(discover_cmd);

  CLI::App* report_cmd = app.add_subcommand("report", "curves, cutoffs, heatmaps, correlations");
  report_cmd->add_option("--outcomes", outcomes_path, "outcomes jsonl")->required();
  report_cmd->add_option("--matrix", matrix_path, "scenario matrix csv")->required();
  report_cmd->add_option("--coverage-basis", basis_str, "all or feasible");
  report_cmd->add_option("--gradient-window", config.gradient_window, "cutoff window");
  report_cmd->add_option("--heatmap-a", config.heatmap_feature_a, "heatmap row parameter index");
  report_cmd->add_option("--heatmap-b", config.heatmap_feature_b, "heatmap column parameter index");
  add_common(report_cmd);

  CLI::App* converge = app.add_subcommand("converge", "metric stability vs scenario count");
  converge->add_option("--outcomes", outcomes_path, "outcomes jsonl")->required();
  converge->add_option("--checkpoints", checkpoints, "prefix sizes")->required()->delimiter(',');
  converge->add_option("--coverage-basis", basis_str, "all or feasible");
  converge->add_option("--gradient-window", config.gradient_window, "cutoff window");
  add_common(converge);

  CLI::App* dump = app.add_subcommand("dump-lp", "write the assembled LP as JSON");
  dump->add_option("--dataset", config.dataset_path, "dataset file")->required();
  dump->add_option("--policy", lp_policy, "policy name");
  dump->add_option("--lp-out", lp_out, "output file");
  add_common(dump);

  if (config.modes.empty()) config.modes = {opt::Mode::perfect};

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    config.coverage_basis = basis_str == "feasible" ? analysis::CoverageBasis::feasible
                                                    : analysis::CoverageBasis::all;
    if (generate->parsed()) {
      std::cout << run_generate(config) << "\n";
    } else if (evaluate->parsed()) {
      config.modes = parse_modes(modes_str);
      std::cout << run_evaluate(config, matrix_path) << "\n";
    } else if (label->parsed()) {
      std::cout << run_label(config, outcomes_path) << "\n";
    } else if (discover_cmd->parsed()) {
      for (const auto& p : run_discover(config, outcomes_path, matrix_path, discover)) {
        std::cout << p << "\n";
      }
    } else if (report_cmd->parsed()) {
      for (const auto& p : run_report(config, outcomes_path, matrix_path)) std::cout << p << "\n";
    } else if (converge->parsed()) {
      std::cout << run_converge(config, outcomes_path, checkpoints) << "\n";
    } else if (dump->parsed()) {
      const auto ds = model::load_dataset(config.dataset_path);
      const auto policy = opt::apply_policy(lp_policy, ds);
      const auto built = opt::build_lp(ds, scen::EventSchedule::identity(), policy,
                                       model::phase_years(), {}, config.solve);
      report::write_file(lp_out, report::lp_json(built));
      std::cout << lp_out << "\n";
    }
  } catch (const model::DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace pathways::orch
