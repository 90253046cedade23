#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathways/pathway.hpp"
#include "pathways/scenario.hpp"

namespace pathways::analysis {

enum class Label { success, failure };

// Whether coverage percentages count all evaluated scenarios or only the
// feasible ones.
enum class CoverageBasis { all, feasible };

struct CurvePoint {
  double coverage = 0.0;  // percent of scenarios at or below this position
  double cost = 0.0;      // percent of the no-event perfect-foresight cost
  std::size_t outcome_index = 0;
};

struct CostCurve {
  std::vector<CurvePoint> points;  // sorted by cost ascending
  double gradient_window = 1.0;    // percent coverage
  int denominator = 0;             // scenario count behind the coverage axis
};

// Sorts the feasible outcomes by normalized cost. Throws if c_base <= 0 or
// no outcome is feasible.
CostCurve cost_curve(const std::vector<opt::PathwayOutcome>& outcomes, double c_base,
                     CoverageBasis basis = CoverageBasis::all, double gradient_window = 1.0);

struct Cutoff {
  std::optional<double> coverage;  // percent; nullopt = never excessive
  std::optional<double> cost;      // curve value at the cutoff
};

// First point, scanning from 10% coverage, where the backward-difference
// gradient exceeds 1 %abs cost per %abs coverage; the cutoff sits one window
// before it and everything beyond counts as excessive.
Cutoff excessive_cost_cutoff(const CostCurve& curve);

// Infeasible -> failure; feasible beyond the cutoff -> failure. Returned in
// the order of `outcomes`.
std::vector<Label> label_outcomes(const std::vector<opt::PathwayOutcome>& outcomes,
                                  const CostCurve& curve, const Cutoff& cutoff);

double success_proportion(const std::vector<Label>& labels);

// Trapezoidal area under piecewise-linear points (x ascending).
double auc(const std::vector<double>& x, const std::vector<double>& y);
// Curve AUC over the coverage axis rescaled to [0, 1].
double auc(const CostCurve& curve);

struct ConvergenceRow {
  std::size_t checkpoint = 0;
  double success_proportion = 0.0;
  double auc = 0.0;
  bool stable_from_here = false;  // both metrics within the band onward
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double tolerance = 0.05;
  std::optional<std::size_t> stable_from;  // earliest stable checkpoint
};

// Recomputes both metrics on each prefix of the outcome stream and flags
// from which checkpoint they stay within +-tolerance of their final values.
ConvergenceReport convergence_report(const std::vector<opt::PathwayOutcome>& outcomes,
                                     const std::vector<std::size_t>& checkpoints, double c_base,
                                     CoverageBasis basis = CoverageBasis::all,
                                     double gradient_window = 1.0, double tolerance = 0.05);

struct FailureHeatmap {
  int feature_a = 0;
  int feature_b = 0;
  std::vector<double> levels_a;  // ascending discrete levels
  std::vector<double> levels_b;
  // cells[i][j]: failure share at (level_a i, level_b j); nullopt = no samples.
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<std::vector<int>> counts;
};

FailureHeatmap failure_heatmap(const std::vector<scen::ScenarioVector>& vectors,
                               const std::vector<Label>& labels, int feature_a, int feature_b);

struct CorrelationMatrix {
  std::vector<std::string> names;  // after dropping all-masked rows/columns
  std::vector<std::vector<std::optional<double>>> values;  // nullopt = masked
  double mask_threshold = 0.6;
};

// Pearson correlations with |r| < mask_threshold masked; constant columns
// masked; rows/columns without any unmasked off-diagonal entry dropped.
CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns,
                                     double mask_threshold = 0.6);

}  // namespace pathways::analysis
