#include "treevote/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "treevote/errors.hpp"
#include "treevote/feature_select.hpp"

namespace treevote {

const char* to_string(TreeAlgorithm algorithm) {
  switch (algorithm) {
    case TreeAlgorithm::Cart: return "cart";
    case TreeAlgorithm::Chaid: return "chaid";
    case TreeAlgorithm::ExhaustiveChaid: return "exhaustive_chaid";
  }
  return "cart";
}

TreeAlgorithm tree_algorithm_from_string(const std::string& text) {
  if (text == "cart") return TreeAlgorithm::Cart;
  if (text == "chaid") return TreeAlgorithm::Chaid;
  if (text == "exhaustive_chaid") return TreeAlgorithm::ExhaustiveChaid;
  fail(ErrorCode::InvalidArgument, "unknown tree algorithm '" + text + "'");
}

void TreeParams::validate() const {
  if (max_depth && *max_depth < 1) fail(ErrorCode::InvalidArgument, "tree params: max_depth must be at least 1");
  if (min_samples_split < 2) fail(ErrorCode::InvalidArgument, "tree params: min_samples_split must be at least 2");
  if (min_samples_leaf < 1) fail(ErrorCode::InvalidArgument, "tree params: min_samples_leaf must be at least 1");
  if (!(alpha_merge > 0.0 && alpha_merge < 1.0)) fail(ErrorCode::InvalidArgument, "tree params: alpha_merge must lie in (0, 1)");
  if (!(alpha_split > 0.0 && alpha_split < 1.0)) fail(ErrorCode::InvalidArgument, "tree params: alpha_split must lie in (0, 1)");
  if (numeric_bins < 2) fail(ErrorCode::InvalidArgument, "tree params: numeric_bins must be at least 2");
}

std::size_t TreeNode::size() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

DecisionTree::DecisionTree(TreeAlgorithm algorithm, std::vector<ColumnSpec> features, std::vector<std::string> classes,
                           TreeNode root)
    : algorithm_(algorithm), features_(std::move(features)), classes_(std::move(classes)), root_(std::move(root)) {}

std::size_t route(const TreeNode& node, const Cell& value) {
  const SplitRule& rule = *node.rule;
  if (rule.is_numeric()) {
    const double* v = std::get_if<double>(&value);
    if (!v) fail(ErrorCode::InvalidArgument, "schema mismatch: expected a number for a numeric split");
    for (std::size_t b = 0; b < rule.thresholds.size(); ++b) {
      if (*v <= rule.thresholds[b]) return b;
    }
    return rule.thresholds.size();
  }
  const std::string* token = std::get_if<std::string>(&value);
  if (!token) fail(ErrorCode::InvalidArgument, "schema mismatch: expected a category for a categorical split");
  for (std::size_t g = 0; g < rule.groups.size(); ++g) {
    const auto& group = rule.groups[g];
    if (std::find(group.begin(), group.end(), *token) != group.end()) return g;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < node.children.size(); ++c) {
    if (node.children[c].size() > node.children[best].size()) best = c;
  }
  return best;
}

const TreeNode& DecisionTree::leaf_for(const Record& record) const {
  if (record.size() != features_.size()) {
    fail(ErrorCode::InvalidArgument, "schema mismatch: record has " + std::to_string(record.size()) + " values, tree expects " +
                                         std::to_string(features_.size()));
  }
  const TreeNode* node = &root_;
  while (!node->is_leaf()) node = &node->children[route(*node, record[node->rule->feature])];
  return *node;
}

namespace {

std::size_t depth_of(const TreeNode& node) {
  std::size_t d = 0;
  for (const auto& c : node.children) d = std::max(d, depth_of(c) + 1);
  return d;
}

std::size_t leaves_of(const TreeNode& node) {
  if (node.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : node.children) n += leaves_of(c);
  return n;
}

}  // namespace

std::size_t DecisionTree::depth() const { return depth_of(root_); }
std::size_t DecisionTree::leaf_count() const { return leaves_of(root_); }

double gini(const std::vector<double>& class_weights) {
  double total = 0.0;
  for (double w : class_weights) total += w;
  if (class_weights.empty() || !(total > 0.0)) fail(ErrorCode::InvalidArgument, "gini: empty class counts");
  double sum_sq = 0.0;
  for (double w : class_weights) sum_sq += (w / total) * (w / total);
  return 1.0 - sum_sq;
}

double gini(const std::vector<std::size_t>& class_counts) {
  return gini(std::vector<double>(class_counts.begin(), class_counts.end()));
}

namespace {

constexpr double kScoreTolerance = 1e-12;

// Feature column prepared for induction.
struct FeatureData {
  ColumnSpec spec;
  const std::vector<double>* numbers = nullptr;
  // Categorical: code per row into `categories` (lexicographic).
  // Numeric under CHAID: equal-frequency bin per row.
  std::vector<std::size_t> codes;
  std::vector<std::string> categories;
  NumericBinning binning;
};

struct Induction {
  std::vector<FeatureData> features;
  const std::vector<std::size_t>* labels = nullptr;
  std::vector<double> weights;
  std::size_t classes = 0;
  TreeParams params;
};

Induction prepare(const Dataset& data, const TreeParams& params, bool bin_numeric) {
  if (data.empty()) fail(ErrorCode::InvalidArgument, "cannot train a tree on an empty dataset");
  params.validate();
  Induction ctx;
  ctx.labels = &data.labels();
  ctx.classes = data.schema().class_count();
  ctx.params = params;
  ctx.weights.assign(data.size(), 1.0);
  for (auto idx : data.schema().feature_indices()) {
    FeatureData f;
    f.spec = data.schema().columns()[idx];
    if (f.spec.kind == ColumnKind::Numeric) {
      f.numbers = &data.numbers(idx);
      if (bin_numeric) {
        f.binning = equal_frequency_bins(*f.numbers, params.numeric_bins);
        f.codes.reserve(data.size());
        for (double v : *f.numbers) f.codes.push_back(f.binning.bin_of(v));
      }
    } else {
      const auto& tokens = data.tokens(idx);
      std::map<std::string, std::size_t> dict;
      for (const auto& t : tokens) dict.emplace(t, 0);
      std::size_t code = 0;
      for (auto& [token, c] : dict) {
        c = code++;
        f.categories.push_back(token);
      }
      f.codes.reserve(tokens.size());
      for (const auto& t : tokens) f.codes.push_back(dict.at(t));
    }
    ctx.features.push_back(std::move(f));
  }
  return ctx;
}

TreeNode make_node(const Induction& ctx, const std::vector<std::size_t>& rows) {
  TreeNode node;
  node.counts.assign(ctx.classes, 0);
  std::vector<double> weighted(ctx.classes, 0.0);
  for (auto r : rows) {
    const auto y = (*ctx.labels)[r];
    ++node.counts[y];
    weighted[y] += ctx.weights[r];
  }
  const double total = std::accumulate(weighted.begin(), weighted.end(), 0.0);
  node.distribution.assign(ctx.classes, 0.0);
  for (std::size_t k = 0; k < ctx.classes; ++k) node.distribution[k] = total > 0.0 ? weighted[k] / total : 0.0;
  std::size_t best = 0;
  for (std::size_t k = 1; k < ctx.classes; ++k) {
    if (weighted[k] > weighted[best]) best = k;
  }
  node.prediction = best;
  return node;
}

bool is_pure(const TreeNode& node) {
  return std::count_if(node.counts.begin(), node.counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
}

bool stop_here(const Induction& ctx, const TreeNode& node, std::size_t rows, std::size_t depth) {
  if (is_pure(node)) return true;
  if (ctx.params.max_depth && depth >= *ctx.params.max_depth) return true;
  return rows < ctx.params.min_samples_split;
}

double weighted_gini(const std::vector<double>& left, double wl, const std::vector<double>& right, double wr) {
  const double total = wl + wr;
  double g = 0.0;
  if (wl > 0.0) g += wl / total * gini(left);
  if (wr > 0.0) g += wr / total * gini(right);
  return g;
}

// ---------------------------------------------------------------- CART

struct CartCandidate {
  double score = std::numeric_limits<double>::infinity();
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t category = 0;
  bool numeric = true;
};

class CartBuilder {
 public:
  CartBuilder(const Induction& ctx, const CartOptions& options) : ctx_(ctx), options_(options) {}

  TreeNode build(const std::vector<std::size_t>& rows, std::size_t depth) {
    TreeNode node = make_node(ctx_, rows);
    if (stop_here(ctx_, node, rows.size(), depth)) return node;

    std::vector<double> parent(ctx_.classes, 0.0);
    for (auto r : rows) parent[(*ctx_.labels)[r]] += ctx_.weights[r];
    const double parent_gini = gini(parent);

    CartCandidate best;
    for (auto f : candidate_features()) {
      if (ctx_.features[f].spec.kind == ColumnKind::Numeric) {
        scan_numeric(f, rows, best);
      } else {
        scan_categorical(f, rows, best);
      }
    }
    // Zero-gain splits are allowed: Gini is concave, so the weighted child
    // impurity never exceeds the parent's, and XOR-style structure needs a
    // flat first step.
    if (!std::isfinite(best.score) || best.score > parent_gini + kScoreTolerance) return node;

    SplitRule rule;
    rule.feature = best.feature;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    const auto& f = ctx_.features[best.feature];
    if (best.numeric) {
      rule.thresholds = {best.threshold};
      for (auto r : rows) ((*f.numbers)[r] <= best.threshold ? left : right).push_back(r);
    } else {
      std::vector<bool> present(f.categories.size(), false);
      for (auto r : rows) present[f.codes[r]] = true;
      std::vector<std::string> rest;
      for (std::size_t c = 0; c < f.categories.size(); ++c) {
        if (present[c] && c != best.category) rest.push_back(f.categories[c]);
      }
      rule.groups = {{f.categories[best.category]}, std::move(rest)};
      for (auto r : rows) (f.codes[r] == best.category ? left : right).push_back(r);
    }
    node.rule = std::move(rule);
    node.children.push_back(build(left, depth + 1));
    node.children.push_back(build(right, depth + 1));
    return node;
  }

 private:
  std::vector<std::size_t> candidate_features() {
    const std::size_t p = ctx_.features.size();
    std::vector<std::size_t> all(p);
    std::iota(all.begin(), all.end(), 0);
    if (options_.mtry == 0 || options_.mtry >= p) return all;
    // Partial Fisher-Yates; the chosen set is scanned in schema order.
    for (std::size_t i = 0; i < options_.mtry; ++i) {
      const auto j = static_cast<std::size_t>(
          random_integer(*options_.feature_rng, static_cast<std::int64_t>(i), static_cast<std::int64_t>(p) - 1));
      std::swap(all[i], all[j]);
    }
    all.resize(options_.mtry);
    std::sort(all.begin(), all.end());
    return all;
  }

  void consider(CartCandidate& best, const CartCandidate& c) {
    if (c.score < best.score - kScoreTolerance) best = c;
  }

  void scan_numeric(std::size_t f, const std::vector<std::size_t>& rows, CartCandidate& best) {
    const auto& values = *ctx_.features[f].numbers;
    std::vector<std::size_t> order = rows;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> left(ctx_.classes, 0.0);
    std::vector<double> right(ctx_.classes, 0.0);
    double wl = 0.0;
    double wr = 0.0;
    for (auto r : order) {
      right[(*ctx_.labels)[r]] += ctx_.weights[r];
      wr += ctx_.weights[r];
    }
    const std::size_t n = order.size();
    const std::size_t min_leaf = ctx_.params.min_samples_leaf;
    for (std::size_t i = 1; i < n; ++i) {
      const auto moved = order[i - 1];
      left[(*ctx_.labels)[moved]] += ctx_.weights[moved];
      right[(*ctx_.labels)[moved]] -= ctx_.weights[moved];
      wl += ctx_.weights[moved];
      wr -= ctx_.weights[moved];
      const double a = values[order[i - 1]];
      const double b = values[order[i]];
      if (a == b || i < min_leaf || n - i < min_leaf) continue;
      CartCandidate c;
      c.feature = f;
      c.numeric = true;
      c.threshold = a + (b - a) / 2.0;
      c.score = weighted_gini(left, wl, right, std::max(wr, 0.0));
      consider(best, c);
    }
  }

  void scan_categorical(std::size_t f, const std::vector<std::size_t>& rows, CartCandidate& best) {
    const auto& feature = ctx_.features[f];
    const std::size_t m = feature.categories.size();
    std::vector<std::vector<double>> per_cat(m, std::vector<double>(ctx_.classes, 0.0));
    std::vector<double> cat_weight(m, 0.0);
    std::vector<std::size_t> cat_rows(m, 0);
    std::vector<double> total(ctx_.classes, 0.0);
    double total_weight = 0.0;
    for (auto r : rows) {
      const auto c = feature.codes[r];
      const auto y = (*ctx_.labels)[r];
      per_cat[c][y] += ctx_.weights[r];
      cat_weight[c] += ctx_.weights[r];
      ++cat_rows[c];
      total[y] += ctx_.weights[r];
      total_weight += ctx_.weights[r];
    }
    const std::size_t min_leaf = ctx_.params.min_samples_leaf;
    for (std::size_t c = 0; c < m; ++c) {
      if (cat_rows[c] == 0 || cat_rows[c] == rows.size()) continue;
      if (cat_rows[c] < min_leaf || rows.size() - cat_rows[c] < min_leaf) continue;
      std::vector<double> rest(ctx_.classes);
      for (std::size_t k = 0; k < ctx_.classes; ++k) rest[k] = std::max(total[k] - per_cat[c][k], 0.0);
      CartCandidate cand;
      cand.feature = f;
      cand.numeric = false;
      cand.category = c;
      cand.score = weighted_gini(per_cat[c], cat_weight[c], rest, std::max(total_weight - cat_weight[c], 0.0));
      consider(best, cand);
    }
  }

  const Induction& ctx_;
  const CartOptions& options_;
};

// ---------------------------------------------------------------- CHAID

std::vector<std::vector<double>> grouped_table(const std::vector<std::vector<double>>& per_category,
                                               const std::vector<std::vector<std::size_t>>& groups) {
  const std::size_t k = per_category.front().size();
  std::vector<std::vector<double>> out(groups.size(), std::vector<double>(k, 0.0));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto c : groups[g]) {
      for (std::size_t j = 0; j < k; ++j) out[g][j] += per_category[c][j];
    }
  }
  return out;
}

struct ChaidCandidate {
  std::size_t feature = 0;
  ChaidGrouping grouping;
  // Category (or bin) codes behind each table row.
  std::vector<std::size_t> present;
};

class ChaidBuilder {
 public:
  ChaidBuilder(const Induction& ctx, bool exhaustive) : ctx_(ctx), exhaustive_(exhaustive) {}

  TreeNode build(const std::vector<std::size_t>& rows, std::size_t depth) {
    TreeNode node = make_node(ctx_, rows);
    if (stop_here(ctx_, node, rows.size(), depth)) return node;

    std::optional<ChaidCandidate> best;
    for (std::size_t f = 0; f < ctx_.features.size(); ++f) {
      auto cand = evaluate(f, rows);
      if (!cand) continue;
      if (!best || cand->grouping.adjusted_p < best->grouping.adjusted_p) best = std::move(cand);
    }
    if (!best || best->grouping.adjusted_p > ctx_.params.alpha_split) return node;

    const auto& feature = ctx_.features[best->feature];
    const auto& groups = best->grouping.groups;
    // code -> branch
    std::map<std::size_t, std::size_t> branch_of;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (auto pos : groups[g]) branch_of[best->present[pos]] = g;
    }

    SplitRule rule;
    rule.feature = best->feature;
    rule.raw_p = best->grouping.raw_p;
    rule.adjusted_p = best->grouping.adjusted_p;
    rule.bonferroni = best->grouping.bonferroni;
    if (feature.spec.kind == ColumnKind::Numeric) {
      for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        const double hi = feature.binning.upper[best->present[groups[g].back()]];
        const double lo = feature.binning.lower[best->present[groups[g + 1].front()]];
        rule.thresholds.push_back(hi + (lo - hi) / 2.0);
      }
    } else {
      for (const auto& group : groups) {
        std::vector<std::string> names;
        for (auto pos : group) names.push_back(feature.categories[best->present[pos]]);
        rule.groups.push_back(std::move(names));
      }
    }

    std::vector<std::vector<std::size_t>> child_rows(groups.size());
    for (auto r : rows) child_rows[branch_of.at(feature.codes[r])].push_back(r);
    node.rule = std::move(rule);
    for (const auto& cr : child_rows) node.children.push_back(build(cr, depth + 1));
    return node;
  }

 private:
  std::optional<ChaidCandidate> evaluate(std::size_t f, const std::vector<std::size_t>& rows) const {
    const auto& feature = ctx_.features[f];
    const std::size_t codes =
        feature.spec.kind == ColumnKind::Numeric ? feature.binning.size() : feature.categories.size();
    std::vector<std::vector<double>> by_code(codes, std::vector<double>(ctx_.classes, 0.0));
    std::vector<std::size_t> rows_per_code(codes, 0);
    for (auto r : rows) {
      by_code[feature.codes[r]][(*ctx_.labels)[r]] += 1.0;
      ++rows_per_code[feature.codes[r]];
    }
    ChaidCandidate cand;
    cand.feature = f;
    std::vector<std::vector<double>> table;
    for (std::size_t c = 0; c < codes; ++c) {
      if (rows_per_code[c] == 0) continue;
      cand.present.push_back(c);
      table.push_back(by_code[c]);
    }
    if (table.size() < 2) return std::nullopt;
    const bool ordinal = feature.spec.kind == ColumnKind::Numeric;
    cand.grouping = chaid_merge(table, ordinal, ctx_.params.alpha_merge, exhaustive_);
    for (const auto& group : cand.grouping.groups) {
      std::size_t n = 0;
      for (auto pos : group) n += rows_per_code[cand.present[pos]];
      if (n < ctx_.params.min_samples_leaf) return std::nullopt;
    }
    return cand;
  }

  const Induction& ctx_;
  bool exhaustive_;
};

DecisionTree train_chaid_impl(const Dataset& train, const TreeParams& params, bool exhaustive) {
  const Induction ctx = prepare(train, params, true);
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  ChaidBuilder builder(ctx, exhaustive);
  TreeNode root = builder.build(rows, 0);
  return DecisionTree(exhaustive ? TreeAlgorithm::ExhaustiveChaid : TreeAlgorithm::Chaid, train.schema().features(),
                      train.schema().classes(), std::move(root));
}

}  // namespace

DecisionTree train_cart(const Dataset& train, const TreeParams& params, const CartOptions& options) {
  Induction ctx = prepare(train, params, false);
  if (!options.weights.empty()) {
    if (options.weights.size() != train.size()) fail(ErrorCode::InvalidArgument, "train_cart: weight count mismatch");
    for (double w : options.weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidArgument, "train_cart: weights must be finite and non-negative");
    }
    ctx.weights = options.weights;
  }
  if (options.mtry > 0 && options.mtry < ctx.features.size() && options.feature_rng == nullptr) {
    fail(ErrorCode::InvalidArgument, "train_cart: feature sampling needs an rng");
  }
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  CartBuilder builder(ctx, options);
  TreeNode root = builder.build(rows, 0);
  return DecisionTree(TreeAlgorithm::Cart, train.schema().features(), train.schema().classes(), std::move(root));
}

DecisionTree train_chaid(const Dataset& train, const TreeParams& params) { return train_chaid_impl(train, params, false); }

DecisionTree train_exhaustive_chaid(const Dataset& train, const TreeParams& params) {
  return train_chaid_impl(train, params, true);
}

double bonferroni_multiplier(std::size_t categories, std::size_t groups, bool ordinal) {
  if (groups == 0 || groups > categories) fail(ErrorCode::InvalidArgument, "bonferroni_multiplier: need 1 <= groups <= categories");
  if (ordinal) {
    // binomial(c - 1, g - 1)
    const std::size_t n = categories - 1;
    const std::size_t k = std::min(groups - 1, n - (groups - 1));
    long double b = 1.0L;
    for (std::size_t i = 1; i <= k; ++i) b = b * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return static_cast<double>(std::round(b));
  }
  // Stirling numbers of the second kind by the recurrence
  // S(n, k) = k S(n-1, k) + S(n-1, k-1); avoids the cancellation of the
  // alternating closed form for large c.
  std::vector<long double> row(groups + 1, 0.0L);
  row[0] = 1.0L;
  for (std::size_t n = 1; n <= categories; ++n) {
    for (std::size_t k = std::min(n, groups); k >= 1; --k) row[k] = static_cast<long double>(k) * row[k] + row[k - 1];
    row[0] = 0.0L;
  }
  return static_cast<double>(row[groups]);
}

ChaidGrouping chaid_merge(const std::vector<std::vector<double>>& category_counts, bool ordinal, double alpha_merge,
                          bool exhaustive) {
  if (category_counts.empty()) fail(ErrorCode::InvalidArgument, "chaid_merge: empty table");
  const std::size_t c = category_counts.size();
  std::vector<std::vector<std::size_t>> groups(c);
  for (std::size_t i = 0; i < c; ++i) groups[i] = {i};

  auto level_p = [&](const std::vector<std::vector<std::size_t>>& g) {
    return table_pvalue(grouped_table(category_counts, g));
  };

  std::vector<std::vector<std::size_t>> best_groups = groups;
  double best_p = level_p(groups);

  while (groups.size() > 2) {
    double merge_p = -1.0;
    std::size_t mi = 0;
    std::size_t mj = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const std::size_t j_end = ordinal ? std::min(i + 2, groups.size()) : groups.size();
      for (std::size_t j = i + 1; j < j_end; ++j) {
        const double p = level_p({groups[i], groups[j]});
        if (p > merge_p) {
          merge_p = p;
          mi = i;
          mj = j;
        }
      }
    }
    if (!exhaustive && merge_p <= alpha_merge) break;
    groups[mi].insert(groups[mi].end(), groups[mj].begin(), groups[mj].end());
    std::sort(groups[mi].begin(), groups[mi].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(mj));
    if (exhaustive) {
      const double p = level_p(groups);
      if (p < best_p) {
        best_p = p;
        best_groups = groups;
      }
    }
  }
  if (!exhaustive) {
    best_groups = groups;
    best_p = level_p(groups);
  }

  ChaidGrouping out;
  out.groups = std::move(best_groups);
  out.raw_p = best_p;
  const double b = bonferroni_multiplier(c, out.groups.size(), ordinal);
  out.bonferroni = b >= 9.2e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(b);
  if (!std::isfinite(b)) {
    out.adjusted_p = out.raw_p > 0.0 ? 1.0 : 0.0;
  } else {
    out.adjusted_p = std::min(1.0, b * out.raw_p);
  }
  return out;
}

}  // namespace treevote
