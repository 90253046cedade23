#include "pathways/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathways::analysis {

CostCurve cost_curve(const std::vector<opt::PathwayOutcome>& outcomes, double c_base,
                     CoverageBasis basis, double gradient_window) {
  if (c_base <= 0.0) throw std::invalid_argument("cost_curve: c_base must be positive");
  CostCurve curve;
  curve.gradient_window = gradient_window;
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].feasible()) feasible.push_back(i);
  }
  if (feasible.empty()) throw std::invalid_argument("cost_curve: no feasible outcomes");
  std::stable_sort(feasible.begin(), feasible.end(), [&](std::size_t a, std::size_t b) {
    return outcomes[a].total_cost < outcomes[b].total_cost;
  });
  curve.denominator =
      basis == CoverageBasis::all ? int(outcomes.size()) : int(feasible.size());
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    CurvePoint p;
    p.outcome_index = feasible[i];
    p.cost = outcomes[feasible[i]].total_cost / c_base * 100.0;
    p.coverage = 100.0 * double(i + 1) / double(curve.denominator);
    curve.points.push_back(p);
  }
  return curve;
}

namespace {

// Curve value at a coverage position: the cost of the last point at or below
// it (step interpolation).
std::optional<double> cost_at(const CostCurve& curve, double coverage) {
  std::optional<double> out;
  for (const auto& p : curve.points) {
    if (p.coverage <= coverage + 1e-12) {
      out = p.cost;
    } else {
      break;
    }
  }
  return out;
}

}  // namespace

Cutoff excessive_cost_cutoff(const CostCurve& curve) {
  const double w = curve.gradient_window;
  // The scan starts once the trailing window lies past 10% coverage, keeping
  // the steep start of the rotated S-curve out of the gradient.
  for (const auto& p : curve.points) {
    const double back = p.coverage - w;
    if (back < 10.0 - 1e-12) continue;
    const auto prev = cost_at(curve, back);
    if (!prev) continue;
    const double gradient = (p.cost - *prev) / w;
    if (gradient > 1.0 + 1e-12) {
      return {back, *prev};
    }
  }
  return {};
}

std::vector<Label> label_outcomes(const std::vector<opt::PathwayOutcome>& outcomes,
                                  const CostCurve& curve, const Cutoff& cutoff) {
  std::vector<Label> labels(outcomes.size(), Label::failure);
  for (const auto& p : curve.points) {
    const bool excessive = cutoff.coverage && p.coverage > *cutoff.coverage + 1e-12;
    labels[p.outcome_index] = excessive ? Label::failure : Label::success;
  }
  return labels;
}

double success_proportion(const std::vector<Label>& labels) {
  if (labels.empty()) throw std::invalid_argument("success_proportion: empty input");
  double s = 0.0;
  for (Label l : labels) s += l == Label::success ? 1.0 : 0.0;
  return s / double(labels.size());
}

double auc(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("auc: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("auc: need at least two points");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] < x[i - 1]) throw std::invalid_argument("auc: x must be non-decreasing");
    area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return area;
}

double auc(const CostCurve& curve) {
  std::vector<double> x, y;
  for (const auto& p : curve.points) {
    x.push_back(p.coverage / 100.0);
    y.push_back(p.cost);
  }
  return auc(x, y);
}

ConvergenceReport convergence_report(const std::vector<opt::PathwayOutcome>& outcomes,
                                     const std::vector<std::size_t>& checkpoints, double c_base,
                                     CoverageBasis basis, double gradient_window,
                                     double tolerance) {
  ConvergenceReport report;
  report.tolerance = tolerance;
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i] <= checkpoints[i - 1]) {
      throw std::invalid_argument("convergence_report: checkpoints must ascend");
    }
  }
  auto metrics_at = [&](std::size_t count) {
    const std::vector<opt::PathwayOutcome> prefix(outcomes.begin(),
                                                  outcomes.begin() + long(count));
    const CostCurve curve = cost_curve(prefix, c_base, basis, gradient_window);
    const Cutoff cutoff = excessive_cost_cutoff(curve);
    const auto labels = label_outcomes(prefix, curve, cutoff);
    return std::pair<double, double>{success_proportion(labels), auc(curve)};
  };

  const auto [final_prop, final_auc] = metrics_at(outcomes.size());
  for (std::size_t c : checkpoints) {
    if (c > outcomes.size()) {
      throw std::invalid_argument("convergence_report: checkpoint exceeds stream length");
    }
    const auto [prop, a] = metrics_at(c);
    report.rows.push_back({c, prop, a, false});
  }
  auto within = [&](double v, double final_v) {
    const double scale = std::abs(final_v) > 0 ? std::abs(final_v) : 1.0;
    return std::abs(v - final_v) <= tolerance * scale;
  };
  bool tail_ok = true;
  for (std::size_t i = report.rows.size(); i-- > 0;) {
    tail_ok = tail_ok && within(report.rows[i].success_proportion, final_prop) &&
              within(report.rows[i].auc, final_auc);
    report.rows[i].stable_from_here = tail_ok;
  }
  for (const auto& row : report.rows) {
    if (row.stable_from_here) {
      report.stable_from = row.checkpoint;
      break;
    }
  }
  return report;
}

FailureHeatmap failure_heatmap(const std::vector<scen::ScenarioVector>& vectors,
                               const std::vector<Label>& labels, int feature_a, int feature_b) {
  if (feature_a < 0 || feature_a >= scen::kNumParams || feature_b < 0 ||
      feature_b >= scen::kNumParams) {
    throw std::invalid_argument("failure_heatmap: unknown feature");
  }
  if (vectors.size() != labels.size()) {
    throw std::invalid_argument("failure_heatmap: vector/label count mismatch");
  }
  FailureHeatmap hm;
  hm.feature_a = feature_a;
  hm.feature_b = feature_b;
  hm.levels_a = scen::param_levels(feature_a);
  hm.levels_b = scen::param_levels(feature_b);
  hm.counts.assign(hm.levels_a.size(), std::vector<int>(hm.levels_b.size(), 0));
  std::vector<std::vector<int>> failures(hm.levels_a.size(),
                                         std::vector<int>(hm.levels_b.size(), 0));
  auto level_index = [](const std::vector<double>& levels, double v) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (std::abs(levels[i] - v) < 1e-9) return i;
    }
    throw std::invalid_argument("failure_heatmap: value off the discrete grid");
  };
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    const std::size_t ia = level_index(hm.levels_a, vectors[r][feature_a]);
    const std::size_t ib = level_index(hm.levels_b, vectors[r][feature_b]);
    hm.counts[ia][ib] += 1;
    if (labels[r] == Label::failure) failures[ia][ib] += 1;
  }
  hm.cells.assign(hm.levels_a.size(),
                  std::vector<std::optional<double>>(hm.levels_b.size(), std::nullopt));
  for (std::size_t i = 0; i < hm.levels_a.size(); ++i) {
    for (std::size_t j = 0; j < hm.levels_b.size(); ++j) {
      if (hm.counts[i][j] > 0) {
        hm.cells[i][j] = double(failures[i][j]) / double(hm.counts[i][j]);
      }
    }
  }
  return hm;
}

CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns,
                                     double mask_threshold) {
  if (names.size() != columns.size()) {
    throw std::invalid_argument("correlation_matrix: name/column count mismatch");
  }
  const std::size_t n = columns.size();
  const std::size_t rows = n ? columns[0].size() : 0;
  if (rows < 2) throw std::invalid_argument("correlation_matrix: need at least two rows");
  for (const auto& c : columns) {
    if (c.size() != rows) throw std::invalid_argument("correlation_matrix: ragged columns");
  }

  std::vector<double> mean(n, 0.0), sdev(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (double v : columns[j]) mean[j] += v;
    mean[j] /= double(rows);
    for (double v : columns[j]) sdev[j] += (v - mean[j]) * (v - mean[j]);
    sdev[j] = std::sqrt(sdev[j]);
  }

  std::vector<std::vector<std::optional<double>>> full(
      n, std::vector<std::optional<double>>(n, std::nullopt));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (sdev[i] == 0.0 || sdev[j] == 0.0) continue;  // undefined r stays masked
      double cov = 0.0;
      for (std::size_t r = 0; r < rows; ++r) {
        cov += (columns[i][r] - mean[i]) * (columns[j][r] - mean[j]);
      }
      const double r = cov / (sdev[i] * sdev[j]);
      if (i == j || std::abs(r) >= mask_threshold) full[i][j] = r;
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < n && !any; ++j) any = i != j && full[i][j].has_value();
    if (any) kept.push_back(i);
  }

  CorrelationMatrix out;
  out.mask_threshold = mask_threshold;
  for (std::size_t i : kept) out.names.push_back(names[i]);
  out.values.assign(kept.size(), std::vector<std::optional<double>>(kept.size(), std::nullopt));
  for (std::size_t a = 0; a < kept.size(); ++a) {
    for (std::size_t b = 0; b < kept.size(); ++b) out.values[a][b] = full[kept[a]][kept[b]];
  }
  return out;
}

}  // namespace pathways::analysis
