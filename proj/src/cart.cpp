#include "pathways/cart.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pathways::cart {

namespace {
constexpr double kGainEps = 1e-12;
}

LabeledDataset make_labeled_dataset(const std::vector<scen::ScenarioVector>& scenarios,
                                    const std::vector<int>& labels) {
  if (scenarios.size() != labels.size()) {
    throw std::invalid_argument("make_labeled_dataset: scenario/label count mismatch");
  }
  LabeledDataset ds;
  for (int i = 0; i < scen::kNumParams; ++i) ds.column_names.push_back(scen::param_name(i));
  ds.column_names.push_back("cum_pv_resistance");
  ds.column_names.push_back("cum_wind_on_resistance");
  ds.column_names.push_back("cum_wind_off_resistance");
  ds.column_names.push_back("cum_demand_rise");
  for (std::size_t r = 0; r < scenarios.size(); ++r) {
    std::vector<double> row(scenarios[r].values.begin(), scenarios[r].values.end());
    for (int base : {scen::kPvBase, scen::kWindOnBase, scen::kWindOffBase, scen::kDemandBase}) {
      double sum = 0.0;
      for (int k = 0; k < 4; ++k) sum += scenarios[r][base + k];
      row.push_back(sum);
    }
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(labels[r]);
  }
  return ds;
}

double gini(const std::vector<double>& class_counts) {
  double total = 0.0;
  for (double c : class_counts) {
    if (c < 0) throw std::invalid_argument("gini: negative class count");
    total += c;
  }
  if (total <= 0.0) throw std::invalid_argument("gini: empty node");
  double g = 1.0;
  for (double c : class_counts) {
    const double p = c / total;
    g -= p * p;
  }
  return g;
}

int ClassificationTree::predict(const std::vector<double>& row) const {
  if (nodes.empty()) throw std::logic_error("predict on unfitted tree");
  if (row.size() != column_names.size()) {
    throw std::invalid_argument("predict: row has " + std::to_string(row.size()) +
                                " columns, tree expects " + std::to_string(column_names.size()));
  }
  int id = 0;
  while (!nodes[std::size_t(id)].is_leaf()) {
    const TreeNode& n = nodes[std::size_t(id)];
    id = row[std::size_t(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[std::size_t(id)].predicted;
}

int ClassificationTree::leaf_count() const {
  int n = 0;
  for (const auto& node : nodes) n += node.is_leaf() ? 1 : 0;
  return n;
}

std::vector<int> ClassificationTree::unique_features() const {
  std::set<int> used;
  for (const auto& n : nodes) {
    if (!n.is_leaf()) used.insert(n.feature);
  }
  return {used.begin(), used.end()};
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // total (dataset-weighted) Gini decrease
  std::array<double, 2> left_counts{}, right_counts{};
};

std::array<double, 2> count_classes(const LabeledDataset& ds, const std::vector<int>& rows) {
  std::array<double, 2> c{};
  for (int r : rows) c[std::size_t(ds.labels[std::size_t(r)])] += 1.0;
  return c;
}

double gini_of(const std::array<double, 2>& c) {
  const double n = c[0] + c[1];
  if (n <= 0.0) return 0.0;
  const double p0 = c[0] / n, p1 = c[1] / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

// Best split of one node over the allowed features; total_rows scales the
// gain to the whole-dataset Gini decrease used for best-first ordering.
SplitChoice best_split(const LabeledDataset& ds, const std::vector<int>& rows,
                       const std::vector<int>& features, double total_rows) {
  SplitChoice best;
  const std::array<double, 2> node_counts = count_classes(ds, rows);
  const double node_n = node_counts[0] + node_counts[1];
  if (node_n < 2.0 || node_counts[0] == 0.0 || node_counts[1] == 0.0) return best;
  const double node_gini = gini_of(node_counts);

  std::vector<std::pair<double, int>> vals;
  vals.reserve(rows.size());
  for (int f : features) {
    vals.clear();
    for (int r : rows) {
      vals.emplace_back(ds.rows[std::size_t(r)][std::size_t(f)], ds.labels[std::size_t(r)]);
    }
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::array<double, 2> left{};
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      left[std::size_t(vals[i].second)] += 1.0;
      if (vals[i].first == vals[i + 1].first) continue;
      const double threshold = vals[i].first + 0.5 * (vals[i + 1].first - vals[i].first);
      const std::array<double, 2> right{node_counts[0] - left[0], node_counts[1] - left[1]};
      const double nl = left[0] + left[1], nr = right[0] + right[1];
      const double gain =
          (node_n * node_gini - nl * gini_of(left) - nr * gini_of(right)) / total_rows;
      if (gain > best.gain + kGainEps) {
        best.found = true;
        best.feature = f;
        best.threshold = threshold;
        best.gain = gain;
        best.left_counts = left;
        best.right_counts = right;
      }
    }
  }
  if (best.found && best.gain <= kGainEps) best.found = false;
  return best;
}

}  // namespace

ClassificationTree fit_tree(const LabeledDataset& ds, int max_leaves, int max_unique_features) {
  if (ds.rows.empty()) throw std::invalid_argument("fit_tree: empty dataset");
  for (const auto& r : ds.rows) {
    if (r.size() != ds.num_features()) throw std::invalid_argument("fit_tree: ragged rows");
  }
  if (max_leaves < 1) throw std::invalid_argument("fit_tree: max_leaves must be >= 1");
  if (max_unique_features < 1) {
    throw std::invalid_argument("fit_tree: max_unique_features must be >= 1");
  }

  ClassificationTree tree;
  tree.column_names = ds.column_names;
  tree.max_leaves = max_leaves;
  tree.max_unique_features = max_unique_features;

  std::vector<std::vector<int>> node_rows;  // per node id
  auto make_node = [&](const std::vector<int>& rows) {
    TreeNode n;
    n.class_counts = count_classes(ds, rows);
    n.gini = gini_of(n.class_counts);
    n.predicted = n.class_counts[1] > n.class_counts[0] ? kFailure : kSuccess;
    tree.nodes.push_back(n);
    node_rows.push_back(rows);
    return int(tree.nodes.size()) - 1;
  };

  std::vector<int> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[std::size_t(i)] = int(i);
  make_node(all);

  const double total_rows = double(ds.size());
  int leaves = 1;
  while (leaves < max_leaves) {
    // Allowed features: everything until the unique-feature budget is spent,
    // then only the features already in the tree.
    const std::vector<int> used = tree.unique_features();
    std::vector<int> allowed;
    if (int(used.size()) >= max_unique_features) {
      allowed = used;
    } else {
      allowed.resize(ds.num_features());
      for (std::size_t f = 0; f < allowed.size(); ++f) allowed[f] = int(f);
    }

    int best_node = -1;
    SplitChoice best;
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      if (!tree.nodes[id].is_leaf()) continue;
      const SplitChoice cand = best_split(ds, node_rows[id], allowed, total_rows);
      if (cand.found && cand.gain > best.gain + kGainEps) {
        best = cand;
        best_node = int(id);
      }
    }
    if (best_node < 0) break;

    std::vector<int> left_rows, right_rows;
    for (int r : node_rows[std::size_t(best_node)]) {
      if (ds.rows[std::size_t(r)][std::size_t(best.feature)] <= best.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }
    const int left_id = make_node(left_rows);
    const int right_id = make_node(right_rows);
    TreeNode& parent = tree.nodes[std::size_t(best_node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left_id;
    parent.right = right_id;
    node_rows[std::size_t(best_node)].clear();
    ++leaves;
  }
  return tree;
}

TreeScores scores(const ClassificationTree& tree, const LabeledDataset& ds) {
  if (tree.column_names != ds.column_names) {
    throw std::invalid_argument("scores: dataset columns do not match the fitted tree");
  }
  TreeScores s;
  const auto used = tree.unique_features();
  s.interpretability = used.empty() ? 1.0 : 1.0 / double(used.size());
  if (ds.rows.empty()) throw std::invalid_argument("scores: empty dataset");
  double correct = 0.0;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (tree.predict(ds.rows[r]) == ds.labels[r]) correct += 1.0;
  }
  s.coverage = correct / double(ds.size());
  return s;
}

double kfold_cv(const LabeledDataset& ds, int k, int max_leaves, int max_unique_features,
                std::uint32_t seed) {
  const int n = int(ds.size());
  if (k < 2 || k > n) throw std::invalid_argument("kfold_cv: need 2 <= k <= rows");

  // Own Fisher-Yates so the shuffle is identical on every platform.
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) idx[std::size_t(i)] = i;
  std::mt19937 gen(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = int(gen() % std::uint32_t(i + 1));
    std::swap(idx[std::size_t(i)], idx[std::size_t(j)]);
  }

  const int base = n / k, rem = n % k;
  double total_acc = 0.0;
  int start = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < rem ? 1 : 0);
    LabeledDataset train, test;
    train.column_names = test.column_names = ds.column_names;
    for (int i = 0; i < n; ++i) {
      const bool held_out = i >= start && i < start + size;
      auto& dst = held_out ? test : train;
      dst.rows.push_back(ds.rows[std::size_t(idx[std::size_t(i)])]);
      dst.labels.push_back(ds.labels[std::size_t(idx[std::size_t(i)])]);
    }
    const ClassificationTree t = fit_tree(train, max_leaves, max_unique_features);
    double correct = 0.0;
    for (std::size_t r = 0; r < test.size(); ++r) {
      if (t.predict(test.rows[r]) == test.labels[r]) correct += 1.0;
    }
    total_acc += correct / double(test.size());
    start += size;
  }
  return total_acc / double(k);
}

std::map<std::string, double> feature_importances(const ClassificationTree& tree) {
  std::map<std::string, double> imp;
  if (tree.nodes.empty()) return imp;
  const double total = tree.nodes[0].samples();
  double sum = 0.0;
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) continue;
    const TreeNode& l = tree.nodes[std::size_t(n.left)];
    const TreeNode& r = tree.nodes[std::size_t(n.right)];
    const double dec =
        (n.samples() * n.gini - l.samples() * l.gini - r.samples() * r.gini) / total;
    imp[tree.column_names[std::size_t(n.feature)]] += dec;
    sum += dec;
  }
  if (sum > 0.0) {
    for (auto& [_, v] : imp) v /= sum;
  }
  return imp;
}

PrunedView prune_failure_paths(const ClassificationTree& tree, double purity) {
  PrunedView view;
  if (tree.nodes.empty()) return view;
  // Parent links for path recovery.
  std::vector<int> parent(tree.nodes.size(), -1);
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const auto& n = tree.nodes[id];
    if (!n.is_leaf()) {
      parent[std::size_t(n.left)] = int(id);
      parent[std::size_t(n.right)] = int(id);
    }
  }
  std::set<int> retained;
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const auto& n = tree.nodes[id];
    if (!n.is_leaf() || n.samples() <= 0.0) continue;
    if (n.class_counts[kFailure] / n.samples() + 1e-12 < purity) continue;
    view.retained_leaves.push_back(int(id));
    for (int cur = int(id); cur >= 0; cur = parent[std::size_t(cur)]) retained.insert(cur);
  }
  view.retained_nodes.assign(retained.begin(), retained.end());
  return view;
}

namespace {

void render_node(const ClassificationTree& tree, const std::set<int>* keep, int id, int depth,
                 std::ostringstream& out) {
  if (keep && !keep->count(id)) return;
  const TreeNode& n = tree.nodes[std::size_t(id)];
  const std::string indent(std::size_t(depth) * 2, ' ');
  char stats[96];
  std::snprintf(stats, sizeof(stats), "gini=%.3f samples=%g value=[%g, %g]", n.gini, n.samples(),
                n.class_counts[0], n.class_counts[1]);
  if (n.is_leaf()) {
    out << indent << "leaf: " << (n.predicted == kFailure ? "failure" : "success") << " (" << stats
        << ")\n";
    return;
  }
  out << indent << tree.column_names[std::size_t(n.feature)] << " <= " << n.threshold << " ("
      << stats << ")\n";
  render_node(tree, keep, n.left, depth + 1, out);
  render_node(tree, keep, n.right, depth + 1, out);
}

}  // namespace

std::string render_text(const ClassificationTree& tree) {
  std::ostringstream out;
  if (!tree.nodes.empty()) render_node(tree, nullptr, 0, 0, out);
  return out.str();
}

std::string render_text(const ClassificationTree& tree, const PrunedView& view) {
  std::ostringstream out;
  const std::set<int> keep(view.retained_nodes.begin(), view.retained_nodes.end());
  if (!tree.nodes.empty() && keep.count(0)) render_node(tree, &keep, 0, 0, out);
  return out.str();
}

std::string export_tree_json(const ClassificationTree& tree, const PrunedView* view) {
  nlohmann::ordered_json j;
  j["max_leaves"] = tree.max_leaves;
  j["max_unique_features"] = tree.max_unique_features;
  j["classes"] = {"success", "failure"};
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  const double total = tree.nodes.empty() ? 1.0 : tree.nodes[0].samples();
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const TreeNode& n = tree.nodes[id];
    nlohmann::ordered_json nj;
    nj["id"] = id;
    if (!n.is_leaf()) {
      nj["feature"] = tree.column_names[std::size_t(n.feature)];
      nj["threshold"] = n.threshold;
      nj["left"] = n.left;
      nj["right"] = n.right;
    }
    nj["gini"] = n.gini;
    nj["samples_share"] = n.samples() / total;
    nj["value"] = {n.class_counts[0], n.class_counts[1]};
    nj["class"] = n.predicted == kFailure ? "failure" : "success";
    nodes.push_back(nj);
  }
  j["nodes"] = nodes;
  if (view) {
    j["pruned"] = {{"retained_nodes", view->retained_nodes},
                   {"retained_leaves", view->retained_leaves}};
  }
  return j.dump(2) + "\n";
}

}  // namespace pathways::cart
