#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "treevote/dataset.hpp"
#include "treevote/rng.hpp"

namespace treevote {

enum class TreeAlgorithm { Cart, Chaid, ExhaustiveChaid };

const char* to_string(TreeAlgorithm algorithm);
TreeAlgorithm tree_algorithm_from_string(const std::string& text);

struct TreeParams {
  std::optional<std::size_t> max_depth;  // nullopt = unlimited
  std::size_t min_samples_split = 5;
  std::size_t min_samples_leaf = 2;
  double alpha_merge = 0.05;
  double alpha_split = 0.05;
  std::size_t numeric_bins = 10;

  static TreeParams cart_defaults() { return {}; }
  static TreeParams chaid_defaults() {
    TreeParams p;
    p.max_depth = 5;
    return p;
  }
  /// Grow until pure: unlimited depth, split 2, leaf 1.
  static TreeParams fully_grown() {
    TreeParams p;
    p.min_samples_split = 2;
    p.min_samples_leaf = 1;
    return p;
  }

  void validate() const;
  bool operator==(const TreeParams&) const = default;
};

struct SplitRule {
  /// Index into DecisionTree::features().
  std::size_t feature = 0;
  /// Numeric rules: ascending cut points; branch b takes (t[b-1], t[b]].
  std::vector<double> thresholds;
  /// Categorical rules: disjoint category groups, one branch each.
  std::vector<std::vector<std::string>> groups;
  /// CHAID only.
  std::optional<double> raw_p;
  std::optional<double> adjusted_p;
  std::size_t bonferroni = 1;

  bool is_numeric() const { return groups.empty(); }
  std::size_t branch_count() const { return is_numeric() ? thresholds.size() + 1 : groups.size(); }

  bool operator==(const SplitRule&) const = default;
};

struct TreeNode {
  /// Training rows reaching the node, per class.
  std::vector<std::size_t> counts;
  /// Class distribution, from row weights when the tree was trained weighted.
  std::vector<double> distribution;
  std::size_t prediction = 0;
  std::optional<SplitRule> rule;
  std::vector<TreeNode> children;

  bool is_leaf() const { return !rule.has_value(); }
  std::size_t size() const;

  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(TreeAlgorithm algorithm, std::vector<ColumnSpec> features, std::vector<std::string> classes,
               TreeNode root);

  TreeAlgorithm algorithm() const { return algorithm_; }
  const std::vector<ColumnSpec>& features() const { return features_; }
  const std::vector<std::string>& classes() const { return classes_; }
  const TreeNode& root() const { return root_; }

  /// Record holds one value per feature(), in that order.
  const TreeNode& leaf_for(const Record& record) const;
  std::size_t predict(const Record& record) const { return leaf_for(record).prediction; }
  const std::vector<double>& predict_dist(const Record& record) const { return leaf_for(record).distribution; }

  std::size_t depth() const;
  std::size_t leaf_count() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  TreeAlgorithm algorithm_ = TreeAlgorithm::Cart;
  std::vector<ColumnSpec> features_;
  std::vector<std::string> classes_;
  TreeNode root_;
};

/// Index of the branch a record takes at an internal node. Unseen or missing
/// categories follow the child with the most training rows; a value equal
/// to a cut point goes left.
std::size_t route(const TreeNode& node, const Cell& value);

double gini(const std::vector<double>& class_weights);
double gini(const std::vector<std::size_t>& class_counts);

struct CartOptions {
  /// Per-row weights folded into the impurity and leaf distributions; empty
  /// means unit weights.
  std::vector<double> weights;
  /// Features sampled (without replacement) at each node; 0 means all.
  std::size_t mtry = 0;
  /// Required when mtry is set.
  SeededRng* feature_rng = nullptr;
};

/// Greedy binary splitting on weighted-child Gini. Numeric candidates are
/// midpoints of consecutive distinct values, categorical candidates are
/// one-category-versus-rest.
DecisionTree train_cart(const Dataset& train, const TreeParams& params, const CartOptions& options = {});

/// Category grouping chosen for one feature at one CHAID node.
struct ChaidGrouping {
  /// Each group lists category positions (into the per-category table).
  std::vector<std::vector<std::size_t>> groups;
  double raw_p = 1.0;
  double adjusted_p = 1.0;
  std::size_t bonferroni = 1;
};

/// Number of ways to merge c categories into g groups: Stirling numbers of
/// the second kind for nominal predictors, binomial(c-1, g-1) for ordinal.
double bonferroni_multiplier(std::size_t categories, std::size_t groups, bool ordinal);

/// Kass merging over a per-category class-count table. Repeatedly merges the
/// pair (adjacent pairs only when ordinal) with the largest pairwise p-value
/// while it exceeds alpha_merge and more than two groups remain. In the
/// exhaustive variant merging runs down to two groups and the level with the
/// smallest raw p-value is kept.
ChaidGrouping chaid_merge(const std::vector<std::vector<double>>& category_counts, bool ordinal, double alpha_merge,
                          bool exhaustive);

DecisionTree train_chaid(const Dataset& train, const TreeParams& params);
DecisionTree train_exhaustive_chaid(const Dataset& train, const TreeParams& params);

}  // namespace treevote
