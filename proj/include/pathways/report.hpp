#pragma once

#include <string>
#include <vector>

#include "pathways/analysis.hpp"
#include "pathways/cart.hpp"
#include "pathways/pathway.hpp"

namespace pathways::report {

// Fixed-format float rendering (9 significant digits) so reruns are
// byte-identical.
std::string num(double v);

std::string outcome_jsonl(const opt::PathwayOutcome& outcome);
opt::PathwayOutcome parse_outcome_jsonl(const std::string& line);
std::vector<opt::PathwayOutcome> read_outcomes_file(const std::string& path);

std::string curve_csv(const analysis::CostCurve& curve,
                      const std::vector<opt::PathwayOutcome>& outcomes,
                      const analysis::Cutoff& cutoff);
std::string heatmap_csv(const analysis::FailureHeatmap& hm);
std::string correlation_csv(const analysis::CorrelationMatrix& cm);
std::string convergence_csv(const analysis::ConvergenceReport& report);
std::string labels_csv(const std::vector<opt::PathwayOutcome>& outcomes,
                       const std::vector<analysis::Label>& labels);
std::string tree_scores_csv(const std::vector<std::array<double, 5>>& rows);

std::string curve_svg(const analysis::CostCurve& curve, const analysis::Cutoff& cutoff,
                      const std::string& title);
std::string heatmap_svg(const analysis::FailureHeatmap& hm, const std::string& title);
std::string correlation_svg(const analysis::CorrelationMatrix& cm, const std::string& title);
std::string convergence_svg(const analysis::ConvergenceReport& report, const std::string& title);

void write_file(const std::string& path, const std::string& content);
std::string lp_json(const opt::BuiltLp& built);

}  // namespace pathways::report
