#include "treevote/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <set>
#include <thread>

#include "treevote/errors.hpp"

namespace treevote {

const char* to_string(Aggregation aggregation) {
  return aggregation == Aggregation::Majority ? "majority" : "weighted_majority";
}

Aggregation aggregation_from_string(const std::string& text) {
  if (text == "majority") return Aggregation::Majority;
  if (text == "weighted_majority") return Aggregation::WeightedMajority;
  fail(ErrorCode::InvalidArgument, "unknown aggregation '" + text + "'");
}

EnsembleModel::EnsembleModel(std::vector<Member> members, Aggregation aggregation, std::vector<std::string> class_order)
    : members_(std::move(members)), aggregation_(aggregation), class_order_(std::move(class_order)) {
  if (members_.empty()) fail(ErrorCode::InvalidArgument, "ensemble needs at least one member");
  for (const auto& m : members_) {
    if (!m.model) fail(ErrorCode::InvalidArgument, "ensemble member is null");
    if (!(m.weight > 0.0) || !std::isfinite(m.weight)) {
      fail(ErrorCode::InvalidArgument, "ensemble member weights must be finite and positive");
    }
    if (m.model->classes() != class_order_) fail(ErrorCode::InvalidArgument, "schema mismatch: member classes differ");
    if (m.model->features() != members_.front().model->features()) {
      fail(ErrorCode::InvalidArgument, "schema mismatch: member features differ");
    }
  }
}

const std::vector<ColumnSpec>& EnsembleModel::features() const { return members_.front().model->features(); }

VoteTally EnsembleModel::tally(const Record& record) const {
  VoteTally t;
  t.votes.assign(class_order_.size(), 0.0);
  t.probability_sums.assign(class_order_.size(), 0.0);
  for (const auto& m : members_) {
    t.votes[m.model->predict(record)] += m.weight;
    const auto dist = m.model->predict_dist(record);
    for (std::size_t k = 0; k < dist.size(); ++k) t.probability_sums[k] += m.weight * dist[k];
  }
  return t;
}

std::size_t resolve_vote(const VoteTally& tally) {
  const std::size_t k = tally.votes.size();
  const double total_votes = std::accumulate(tally.votes.begin(), tally.votes.end(), 0.0);
  const double total_prob = std::accumulate(tally.probability_sums.begin(), tally.probability_sums.end(), 0.0);
  // Sums differ by rounding when members are summed in another order.
  const double vote_eps = 1e-9 * std::max(1.0, total_votes);
  const double prob_eps = 1e-9 * std::max(1.0, total_prob);

  const double top = *std::max_element(tally.votes.begin(), tally.votes.end());
  std::vector<std::size_t> tied;
  for (std::size_t y = 0; y < k; ++y) {
    if (tally.votes[y] >= top - vote_eps) tied.push_back(y);
  }
  if (tied.size() == 1) return tied.front();
  double best_prob = -1.0;
  for (auto y : tied) best_prob = std::max(best_prob, tally.probability_sums[y]);
  for (auto y : tied) {
    if (tally.probability_sums[y] >= best_prob - prob_eps) return y;
  }
  return tied.front();
}

std::size_t EnsembleModel::vote(const Record& record) const { return resolve_vote(tally(record)); }

std::vector<double> EnsembleModel::distribution(const Record& record) const {
  std::vector<double> out(class_order_.size(), 0.0);
  double total = 0.0;
  for (const auto& m : members_) {
    const auto dist = m.model->predict_dist(record);
    for (std::size_t k = 0; k < dist.size(); ++k) out[k] += m.weight * dist[k];
    total += m.weight;
  }
  for (auto& v : out) v /= total;
  return out;
}

const std::vector<ColumnSpec>& Model::features() const {
  return is_tree() ? tree().features() : ensemble().features();
}

const std::vector<std::string>& Model::classes() const {
  return is_tree() ? tree().classes() : ensemble().class_order();
}

std::size_t Model::predict(const Record& record) const {
  return is_tree() ? tree().predict(record) : ensemble().vote(record);
}

std::vector<double> Model::predict_dist(const Record& record) const {
  return is_tree() ? tree().predict_dist(record) : ensemble().distribution(record);
}

const char* to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Cart: return "cart";
    case LearnerKind::Chaid: return "chaid";
    case LearnerKind::ExhaustiveChaid: return "exhaustive_chaid";
    case LearnerKind::Boosted: return "boosted";
    case LearnerKind::RandomForest: return "random_forest";
  }
  return "cart";
}

LearnerKind learner_kind_from_string(const std::string& text) {
  if (text == "cart") return LearnerKind::Cart;
  if (text == "chaid") return LearnerKind::Chaid;
  if (text == "exhaustive_chaid") return LearnerKind::ExhaustiveChaid;
  if (text == "boosted") return LearnerKind::Boosted;
  if (text == "random_forest") return LearnerKind::RandomForest;
  fail(ErrorCode::InvalidArgument, "unknown learner kind '" + text + "'");
}

void BoostParams::validate() const {
  if (rounds < 1) fail(ErrorCode::InvalidArgument, "boost params: rounds must be at least 1");
  if (base_max_depth < 1) fail(ErrorCode::InvalidArgument, "boost params: base_max_depth must be at least 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "boost params: learning_rate must lie in (0, 1]");
  }
}

std::size_t default_mtry(std::size_t feature_count) {
  std::size_t m = 0;
  while (m * m < feature_count) ++m;
  return std::max<std::size_t>(m, 1);
}

void ForestParams::validate(std::size_t feature_count) const {
  if (n_trees < 1) fail(ErrorCode::InvalidArgument, "forest params: n_trees must be at least 1");
  if (mtry > feature_count) {
    fail(ErrorCode::InvalidArgument, "forest params: mtry " + std::to_string(mtry) + " exceeds feature count " +
                                         std::to_string(feature_count));
  }
}

LearnerSpec LearnerSpec::defaults_for(LearnerKind kind) {
  LearnerSpec spec;
  spec.kind = kind;
  if (kind == LearnerKind::Chaid || kind == LearnerKind::ExhaustiveChaid) spec.tree = TreeParams::chaid_defaults();
  return spec;
}

namespace {

// Runs fn(0..n-1) and returns results in index order.
template <class T, class Fn>
std::vector<T> run_indexed(std::size_t n, bool parallel, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  const std::size_t workers = parallel ? std::min<std::size_t>(n, std::max(2u, std::thread::hardware_concurrency())) : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) slots[i].emplace(fn(i));
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) slots[i].emplace(fn(i));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

BootstrapSample identity_sample(std::size_t n) {
  BootstrapSample s;
  s.indices.resize(n);
  std::iota(s.indices.begin(), s.indices.end(), 0);
  return s;
}

}  // namespace

std::shared_ptr<const Model> train_learner(const LearnerSpec& spec, const Dataset& train, const SeededRng& rng,
                                           bool parallel) {
  switch (spec.kind) {
    case LearnerKind::Cart: return std::make_shared<const Model>("cart", train_cart(train, spec.tree));
    case LearnerKind::Chaid: return std::make_shared<const Model>("chaid", train_chaid(train, spec.tree));
    case LearnerKind::ExhaustiveChaid:
      return std::make_shared<const Model>("exhaustive_chaid", train_exhaustive_chaid(train, spec.tree));
    case LearnerKind::Boosted: return std::make_shared<const Model>(train_boosted(train, spec.boost, rng));
    case LearnerKind::RandomForest:
      return std::make_shared<const Model>(train_random_forest(train, spec.forest, rng, parallel));
  }
  fail(ErrorCode::InvalidArgument, "unknown learner kind");
}

std::vector<BootstrapSample> bag_samples(std::size_t rows, std::size_t members, const SeededRng& rng, bool bootstrap) {
  std::vector<BootstrapSample> out;
  for (std::size_t i = 0; i < members; ++i) {
    if (bootstrap) {
      SeededRng member = derive_rng(rng, i);
      out.push_back(bootstrap_indices(rows, member));
    } else {
      out.push_back(identity_sample(rows));
    }
  }
  return out;
}

Model bag(const LearnerSpec& base, const Dataset& train, std::size_t members, const SeededRng& rng,
          const BagOptions& options) {
  if (members < 1) fail(ErrorCode::InvalidArgument, "bag: need at least one member");
  if (train.empty()) fail(ErrorCode::InvalidArgument, "bag: empty training set");
  auto trained = run_indexed<Member>(members, options.parallel, [&](std::size_t i) {
    SeededRng member_rng = derive_rng(rng, i);
    const BootstrapSample sample =
        options.bootstrap ? bootstrap_indices(train.size(), member_rng) : identity_sample(train.size());
    return Member{train_learner(base, train.subset(sample.indices), member_rng), 1.0};
  });
  return Model("bagged", EnsembleModel(std::move(trained), Aggregation::Majority, train.schema().classes()));
}

double samme_alpha(double error, std::size_t classes, double learning_rate) {
  static const double cap = std::log(1e10);
  if (classes < 2) fail(ErrorCode::InvalidArgument, "samme_alpha: need at least two classes");
  if (error <= 0.0) return cap;
  const double alpha = learning_rate * (std::log((1.0 - error) / error) + std::log(static_cast<double>(classes - 1)));
  return std::min(alpha, cap);
}

Model train_boosted(const Dataset& train, const BoostParams& params, const SeededRng& /*rng*/, BoostTrace* trace) {
  params.validate();
  if (train.empty()) fail(ErrorCode::InvalidArgument, "train_boosted: empty training set");
  const std::set<std::size_t> present(train.labels().begin(), train.labels().end());
  if (present.size() < 2) fail(ErrorCode::Degenerate, "train_boosted: single-class data");
  const std::size_t k = train.schema().class_count();
  const std::size_t n = train.size();

  // Row-count minima mean little once rows carry weights.
  TreeParams base = TreeParams::fully_grown();
  base.max_depth = params.base_max_depth;

  const auto records = extract_records(train, train.schema().features());
  CartOptions options;
  options.weights.assign(n, 1.0 / static_cast<double>(n));

  std::vector<Member> members;
  for (std::size_t m = 0; m < params.rounds; ++m) {
    auto tree = std::make_shared<const Model>("cart", train_cart(train, base, options));
    std::vector<bool> missed(n);
    double err = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      missed[i] = tree->predict(records[i]) != train.labels()[i];
      if (missed[i]) err += options.weights[i];
      total += options.weights[i];
    }
    err /= total;
    if (err >= 1.0 - 1.0 / static_cast<double>(k)) break;
    const double alpha = samme_alpha(err, k, params.learning_rate);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (missed[i]) options.weights[i] *= std::exp(alpha);
      sum += options.weights[i];
    }
    for (auto& w : options.weights) w /= sum;
    if (trace) {
      trace->errors.push_back(err);
      trace->alphas.push_back(alpha);
      trace->weight_sums.push_back(std::accumulate(options.weights.begin(), options.weights.end(), 0.0));
    }
    members.push_back(Member{std::move(tree), alpha});
    if (err == 0.0) break;
  }
  if (members.empty()) fail(ErrorCode::Degenerate, "boosting degenerate: no round beat chance");
  return Model("boosted", EnsembleModel(std::move(members), Aggregation::WeightedMajority, train.schema().classes()));
}

Model train_random_forest(const Dataset& train, const ForestParams& params, const SeededRng& rng, bool parallel) {
  if (train.empty()) fail(ErrorCode::InvalidArgument, "train_random_forest: empty training set");
  const std::size_t p = train.schema().feature_indices().size();
  params.validate(p);
  const std::size_t mtry = params.mtry == 0 ? default_mtry(p) : params.mtry;
  const TreeParams grown = TreeParams::fully_grown();

  auto trees = run_indexed<Member>(params.n_trees, parallel, [&](std::size_t i) {
    SeededRng tree_rng = derive_rng(rng, i);
    const BootstrapSample sample =
        params.bootstrap ? bootstrap_indices(train.size(), tree_rng) : identity_sample(train.size());
    CartOptions options;
    options.mtry = mtry;
    options.feature_rng = &tree_rng;
    return Member{std::make_shared<const Model>("cart", train_cart(train.subset(sample.indices), grown, options)), 1.0};
  });
  return Model("random_forest", EnsembleModel(std::move(trees), Aggregation::Majority, train.schema().classes()));
}

Model committee(const std::vector<std::shared_ptr<const Model>>& models) {
  if (models.empty()) fail(ErrorCode::InvalidArgument, "committee needs at least one model");
  std::vector<Member> members;
  for (const auto& m : models) members.push_back(Member{m, 1.0});
  const auto classes = models.front()->classes();
  return Model("committee", EnsembleModel(std::move(members), Aggregation::Majority, classes));
}

}  // namespace treevote
