#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pathways/scenario.hpp"

namespace pathways::cart {

inline constexpr int kSuccess = 0;
inline constexpr int kFailure = 1;

struct LabeledDataset {
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;  // kSuccess / kFailure

  std::size_t size() const { return rows.size(); }
  std::size_t num_features() const { return column_names.size(); }
};

// The 47 scenario parameters plus the four derived columns: cumulative
// pv/wind_on/wind_off resistance and cumulative demand rise (sums over the
// 2035-2050 values).
LabeledDataset make_labeled_dataset(const std::vector<scen::ScenarioVector>& scenarios,
                                    const std::vector<int>& labels);

// 1 - sum p_c^2 over the class counts. Throws on an empty node.
double gini(const std::vector<double>& class_counts);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<double, 2> class_counts{};  // success, failure
  double gini = 0.0;
  int predicted = kSuccess;

  bool is_leaf() const { return feature < 0; }
  double samples() const { return class_counts[0] + class_counts[1]; }
};

struct ClassificationTree {
  std::vector<TreeNode> nodes;  // node 0 is the root; empty = unfitted
  std::vector<std::string> column_names;
  int max_leaves = 0;
  int max_unique_features = 0;

  int predict(const std::vector<double>& row) const;
  int leaf_count() const;
  std::vector<int> unique_features() const;  // sorted column indices used by splits
};

// Greedy best-first growth by largest total Gini decrease; thresholds are
// midpoints between consecutive distinct sorted values; ties break to the
// lowest column index, then the lowest threshold, then the oldest node.
ClassificationTree fit_tree(const LabeledDataset& ds, int max_leaves, int max_unique_features);

struct TreeScores {
  double interpretability = 1.0;  // 1 / unique feature count (1.0 with no splits)
  double coverage = 0.0;          // training accuracy
};

TreeScores scores(const ClassificationTree& tree, const LabeledDataset& ds);

// Mean held-out accuracy over a deterministic seeded k-fold split.
double kfold_cv(const LabeledDataset& ds, int k, int max_leaves, int max_unique_features,
                std::uint32_t seed);

// Per-feature share of the total Gini decrease; empty for split-free trees.
std::map<std::string, double> feature_importances(const ClassificationTree& tree);

// Display-only pruning: keeps the root-to-leaf paths whose leaf predicts
// failure with at least `purity` class share. Prediction is unaffected.
struct PrunedView {
  std::vector<int> retained_nodes;   // sorted ids on any retained path
  std::vector<int> retained_leaves;  // qualifying failure leaves
};

PrunedView prune_failure_paths(const ClassificationTree& tree, double purity = 0.9);

std::string render_text(const ClassificationTree& tree);
std::string render_text(const ClassificationTree& tree, const PrunedView& view);
std::string export_tree_json(const ClassificationTree& tree, const PrunedView* view = nullptr);

}  // namespace pathways::cart
