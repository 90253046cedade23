#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "pathways/analysis.hpp"

using namespace pathways;
using analysis::CostCurve;
using analysis::Label;
using opt::PathwayOutcome;

namespace {

PathwayOutcome outcome(std::int64_t id, double cost, bool feasible = true) {
  PathwayOutcome o;
  o.scenario_id = id;
  o.status = feasible ? PathwayOutcome::Status::feasible : PathwayOutcome::Status::infeasible;
  o.total_cost = cost;
  return o;
}

// 100-point analytic curve: flat at 100% for the first 60 points, then
// +2%abs per 1%abs coverage step.
std::vector<PathwayOutcome> analytic_outcomes(double c_base, double scale = 1.0) {
  std::vector<PathwayOutcome> out;
  for (int i = 1; i <= 100; ++i) {
    const double pct = i <= 60 ? 100.0 : 100.0 + 2.0 * (i - 60);
    out.push_back(outcome(i, scale * c_base * pct / 100.0));
  }
  return out;
}

nlohmann::json load_json(const std::string& name) {
  std::ifstream in(std::string(PATHWAYS_TEST_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("flat curve stays at 100 percent with no cutoff") {
  const std::vector<PathwayOutcome> outs = {outcome(1, 500), outcome(2, 500), outcome(3, 500)};
  const CostCurve curve = analysis::cost_curve(outs, 500.0);
  REQUIRE(curve.points.size() == 3);
  for (const auto& p : curve.points) CHECK(p.cost == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(curve.points.front().coverage == doctest::Approx(100.0 / 3).epsilon(1e-12));
  CHECK(curve.points.back().coverage == doctest::Approx(100.0).epsilon(1e-12));
  const auto cutoff = analysis::excessive_cost_cutoff(curve);
  CHECK(!cutoff.coverage);
  const auto labels = analysis::label_outcomes(outs, curve, cutoff);
  for (Label l : labels) CHECK(l == Label::success);
}

TEST_CASE("curve sorts costs ascending") {
  const std::vector<PathwayOutcome> outs = {outcome(1, 100), outcome(2, 120), outcome(3, 110)};
  const CostCurve curve = analysis::cost_curve(outs, 100.0);
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[0].cost == doctest::Approx(100.0));
  CHECK(curve.points[1].cost == doctest::Approx(110.0));
  CHECK(curve.points[2].cost == doctest::Approx(120.0));
  CHECK(curve.points[1].outcome_index == 2);
}

TEST_CASE("infeasible outcomes widen the coverage denominator only under basis=all") {
  const std::vector<PathwayOutcome> outs = {outcome(1, 100), outcome(2, 0, false),
                                            outcome(3, 130)};
  const CostCurve all = analysis::cost_curve(outs, 100.0, analysis::CoverageBasis::all);
  CHECK(all.denominator == 3);
  CHECK(all.points.size() == 2);
  CHECK(all.points.back().coverage == doctest::Approx(200.0 / 3).epsilon(1e-12));
  const CostCurve feas = analysis::cost_curve(outs, 100.0, analysis::CoverageBasis::feasible);
  CHECK(feas.denominator == 2);
  CHECK(feas.points.back().coverage == doctest::Approx(100.0).epsilon(1e-12));
  CHECK_THROWS(analysis::cost_curve({outcome(1, 0, false)}, 100.0));
  CHECK_THROWS(analysis::cost_curve(outs, 0.0));
}

TEST_CASE("thousand-outcome fixture reproduces the independent sort-and-scale curve") {
  const auto fx = load_json("curve_fixture.json");
  std::vector<PathwayOutcome> outs;
  for (const auto& row : fx["outcomes"]) {
    outs.push_back(outcome(row["scenario_id"].get<std::int64_t>(),
                           row["feasible"].get<bool>() ? row["total_cost"].get<double>() : 0.0,
                           row["feasible"].get<bool>()));
  }
  const CostCurve curve = analysis::cost_curve(outs, fx["c_base"].get<double>());
  REQUIRE(curve.points.size() == fx["curve"].size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].coverage ==
          doctest::Approx(fx["curve"][i]["coverage"].get<double>()).epsilon(1e-12));
    CHECK(curve.points[i].cost ==
          doctest::Approx(fx["curve"][i]["cost"].get<double>()).epsilon(1e-12));
    CHECK(outs[curve.points[i].outcome_index].scenario_id ==
          fx["curve"][i]["scenario_id"].get<std::int64_t>());
  }
  CHECK(analysis::auc(curve) == doctest::Approx(fx["auc"].get<double>()).epsilon(1e-12));
}

TEST_CASE("piecewise-linear curve puts the cutoff exactly at 60 percent") {
  const auto outs = analytic_outcomes(1000.0);
  const CostCurve curve = analysis::cost_curve(outs, 1000.0);
  const auto cutoff = analysis::excessive_cost_cutoff(curve);
  REQUIRE(cutoff.coverage.has_value());
  CHECK(*cutoff.coverage == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(*cutoff.cost == doctest::Approx(100.0).epsilon(1e-12));
  const auto labels = analysis::label_outcomes(outs, curve, cutoff);
  int failures = 0;
  for (Label l : labels) failures += l == Label::failure ? 1 : 0;
  CHECK(failures == 40);
}

TEST_CASE("steepness before ten percent coverage is ignored") {
  std::vector<PathwayOutcome> outs;
  for (int i = 1; i <= 100; ++i) {
    // Steep climb over the first nine points, flat afterwards.
    const double pct = i < 10 ? 60.0 + 5.0 * i : 105.0;
    outs.push_back(outcome(i, pct));
  }
  const CostCurve curve = analysis::cost_curve(outs, 100.0);
  CHECK(!analysis::excessive_cost_cutoff(curve).coverage.has_value());
}

TEST_CASE("cutoff and labels are invariant under cost rescaling") {
  const auto base_outs = analytic_outcomes(1000.0);
  const auto scaled_outs = analytic_outcomes(1000.0, 3.7);
  const CostCurve a = analysis::cost_curve(base_outs, 1000.0);
  const CostCurve b = analysis::cost_curve(scaled_outs, 3700.0);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(b.points[i].cost == doctest::Approx(a.points[i].cost).epsilon(1e-12));
    CHECK(b.points[i].coverage == a.points[i].coverage);
  }
  const auto ca = analysis::excessive_cost_cutoff(a);
  const auto cb = analysis::excessive_cost_cutoff(b);
  REQUIRE(ca.coverage.has_value());
  REQUIRE(cb.coverage.has_value());
  CHECK(*ca.coverage == *cb.coverage);
  CHECK(analysis::label_outcomes(base_outs, a, ca) ==
        analysis::label_outcomes(scaled_outs, b, cb));
}

TEST_CASE("labels: infeasible always fails, cheap feasible passes") {
  std::vector<PathwayOutcome> outs = {outcome(1, 100), outcome(2, 0, false), outcome(3, 100)};
  const CostCurve curve = analysis::cost_curve(outs, 100.0);
  analysis::Cutoff cutoff;
  cutoff.coverage = 130.0;  // far beyond the curve: everything feasible passes
  const auto labels = analysis::label_outcomes(outs, curve, cutoff);
  CHECK(labels[0] == Label::success);
  CHECK(labels[1] == Label::failure);
  CHECK(labels[2] == Label::success);
}

TEST_CASE("twenty-row fixture labels match the hand tally") {
  // 14 feasible at 100%, 3 feasible at 200% (beyond the cutoff the steep
  // tail creates), 3 infeasible -> 14 successes.
  std::vector<PathwayOutcome> outs;
  for (int i = 1; i <= 14; ++i) outs.push_back(outcome(i, 100.0));
  for (int i = 15; i <= 17; ++i) outs.push_back(outcome(i, 100.0 + 40.0 * (i - 14)));
  for (int i = 18; i <= 20; ++i) outs.push_back(outcome(i, 0.0, false));
  const CostCurve curve = analysis::cost_curve(outs, 100.0);
  const auto cutoff = analysis::excessive_cost_cutoff(curve);
  const auto labels = analysis::label_outcomes(outs, curve, cutoff);
  int successes = 0, failures = 0;
  for (Label l : labels) (l == Label::success ? successes : failures) += 1;
  CHECK(successes == 14);
  CHECK(failures == 6);
  CHECK(analysis::success_proportion(labels) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("success proportion basics") {
  std::vector<Label> mixed(7, Label::success);
  mixed.insert(mixed.end(), 3, Label::failure);
  CHECK(analysis::success_proportion(mixed) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(analysis::success_proportion({Label::success, Label::success}) == 1.0);
  CHECK_THROWS(analysis::success_proportion({}));
}

TEST_CASE("trapezoid area basics") {
  CHECK(analysis::auc({0.0, 1.0}, {1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(analysis::auc({0.0, 1.0}, {0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(analysis::auc({0.0, 0.5, 1.0}, {1.0, 2.0, 1.0}) ==
        doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS(analysis::auc({0.0}, {1.0}));
  CHECK_THROWS(analysis::auc({1.0, 0.0}, {1.0, 1.0}));
}

TEST_CASE("auc respects pointwise dominance") {
  const std::vector<double> x = {0.1, 0.4, 0.7, 1.0};
  const std::vector<double> lo = {100, 101, 103, 110};
  std::vector<double> hi = lo;
  for (auto& v : hi) v += 7.5;
  CHECK(analysis::auc(x, lo) <= analysis::auc(x, hi));
}

TEST_CASE("constructed 2000-sample stream stabilizes within the 5 percent band by 1000") {
  // Repeating 20-scenario pattern; every prefix that is a multiple of the
  // pattern has identical metrics, so the limit is known by construction.
  std::vector<PathwayOutcome> outs;
  for (int i = 0; i < 2000; ++i) {
    const int k = i % 20;
    if (k >= 17) {
      outs.push_back(outcome(i + 1, 0.0, false));
    } else {
      outs.push_back(outcome(i + 1, 100.0 + 2.0 * k + (i % 7) * 0.3));
    }
  }
  std::vector<std::size_t> checkpoints;
  for (std::size_t c = 100; c <= 2000; c += 100) checkpoints.push_back(c);
  const auto report = analysis::convergence_report(outs, checkpoints, 100.0);
  REQUIRE(report.stable_from.has_value());
  CHECK(*report.stable_from <= 1000);
  CHECK(report.rows.back().stable_from_here);
}

TEST_CASE("constant stream is stable from the first checkpoint") {
  std::vector<PathwayOutcome> outs;
  for (int i = 1; i <= 200; ++i) outs.push_back(outcome(i, 110.0));
  const auto report = analysis::convergence_report(outs, {20, 50, 100, 200}, 100.0);
  REQUIRE(report.stable_from.has_value());
  CHECK(*report.stable_from == 20);
  for (const auto& r : report.rows) {
    CHECK(r.success_proportion == 1.0);
    CHECK(r.stable_from_here);
  }
}

TEST_CASE("alternating extreme costs keep the success share at one half") {
  std::vector<PathwayOutcome> outs;
  for (int i = 1; i <= 20; ++i) {
    outs.push_back(outcome(i, i % 2 == 1 ? 100.0 : 1000.0));
  }
  const auto report = analysis::convergence_report(outs, {10, 20}, 100.0);
  CHECK(report.rows[0].success_proportion == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.rows[1].success_proportion == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS(analysis::convergence_report(outs, {10, 30}, 100.0));
}

TEST_CASE("failure heatmap counts cells and marks missing ones") {
  std::vector<scen::ScenarioVector> vectors;
  std::vector<Label> labels;
  // p00 (six levels) vs p46 (five levels): populate a diagonal band.
  const auto& la = scen::param_levels(0);
  const auto& lb = scen::param_levels(46);
  for (std::size_t i = 0; i < la.size(); ++i) {
    for (std::size_t j = 0; j < lb.size(); ++j) {
      if ((i + j) % 2 == 1) continue;  // leave holes
      for (int rep = 0; rep < 4; ++rep) {
        scen::ScenarioVector v;
        v.values[0] = la[i];
        v.values[46] = lb[j];
        vectors.push_back(v);
        labels.push_back(rep < int(i) ? Label::failure : Label::success);
      }
    }
  }
  const auto hm = analysis::failure_heatmap(vectors, labels, 0, 46);
  REQUIRE(hm.levels_a.size() == 6);
  REQUIRE(hm.levels_b.size() == 5);
  for (std::size_t i = 0; i < hm.levels_a.size(); ++i) {
    for (std::size_t j = 0; j < hm.levels_b.size(); ++j) {
      if ((i + j) % 2 == 1) {
        CHECK(!hm.cells[i][j].has_value());
      } else {
        REQUIRE(hm.cells[i][j].has_value());
        // rep < i of 4 repeats fail; my hand tally caps at 4/4.
        const double expect = std::min<double>(double(i), 4.0) / 4.0;
        CHECK(*hm.cells[i][j] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(*hm.cells[i][j] >= 0.0);
        CHECK(*hm.cells[i][j] <= 1.0);
      }
    }
  }
  CHECK_THROWS(analysis::failure_heatmap(vectors, labels, 0, 47));
}

TEST_CASE("all-failure labels fill every populated cell with 1.0") {
  std::vector<scen::ScenarioVector> vectors;
  for (int i = 0; i < 30; ++i) {
    scen::ScenarioVector v;
    v.values[2] = scen::param_levels(2)[std::size_t(i % 6)];
    v.values[3] = scen::param_levels(3)[std::size_t((i / 6) % 6)];
    vectors.push_back(v);
  }
  const std::vector<Label> labels(vectors.size(), Label::failure);
  const auto hm = analysis::failure_heatmap(vectors, labels, 2, 3);
  for (const auto& row : hm.cells) {
    for (const auto& cell : row) {
      if (cell) CHECK(*cell == 1.0);
    }
  }
}

TEST_CASE("populated-cell weighted mean equals the overall failure share") {
  const auto scenarios = scen::generate_scenarios(128, 1);
  std::vector<Label> labels;
  for (const auto& s : scenarios) {
    labels.push_back(s[3] >= 0.8 ? Label::failure : Label::success);
  }
  const auto hm = analysis::failure_heatmap(scenarios, labels, 2, 3);
  double weighted = 0.0, total = 0.0, failures = 0.0;
  for (std::size_t i = 0; i < hm.cells.size(); ++i) {
    for (std::size_t j = 0; j < hm.cells[i].size(); ++j) {
      if (!hm.cells[i][j]) continue;
      weighted += *hm.cells[i][j] * hm.counts[i][j];
      total += hm.counts[i][j];
    }
  }
  for (Label l : labels) failures += l == Label::failure ? 1.0 : 0.0;
  CHECK(total == double(scenarios.size()));
  CHECK(weighted / total == doctest::Approx(failures / total).epsilon(1e-12));
}

TEST_CASE("correlation fixture matches numpy and masking drops quiet columns") {
  const auto fx = load_json("corr_fixture.json");
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  for (const auto& n : fx["names"]) {
    names.push_back(n.get<std::string>());
    cols.push_back(fx["columns"][names.back()].get<std::vector<double>>());
  }
  // Unmasked check against numpy.corrcoef.
  const auto full = analysis::correlation_matrix(names, cols, 0.0);
  REQUIRE(full.names == names);
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      REQUIRE(full.values[i][j].has_value());
      CHECK(*full.values[i][j] ==
            doctest::Approx(fx["pearson"][i][j].get<double>()).epsilon(1e-9));
    }
  }
  // At 0.6 the independent column c has no strong partner and is dropped.
  const auto masked = analysis::correlation_matrix(names, cols, 0.6);
  CHECK(masked.names == std::vector<std::string>{"a", "b", "d"});
}

TEST_CASE("duplicated and negated columns give plus and minus one") {
  std::vector<double> base = {1.0, 2.0, 5.0, 7.0, 11.0};
  std::vector<double> neg;
  for (double v : base) neg.push_back(-v);
  const auto cm = analysis::correlation_matrix({"x", "copy", "neg"}, {base, base, neg}, 0.6);
  REQUIRE(cm.names.size() == 3);
  CHECK(*cm.values[0][1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*cm.values[0][2] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("constant columns are masked out") {
  std::vector<double> base = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> flat(4, 2.5);
  const auto cm = analysis::correlation_matrix({"x", "flat"}, {base, flat}, 0.0);
  CHECK(cm.names == std::vector<std::string>{});  // nothing correlates with x
}
