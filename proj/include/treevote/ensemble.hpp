#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "treevote/dataset.hpp"
#include "treevote/rng.hpp"
#include "treevote/sampling.hpp"
#include "treevote/tree.hpp"

namespace treevote {

class Model;

enum class Aggregation { Majority, WeightedMajority };

const char* to_string(Aggregation aggregation);
Aggregation aggregation_from_string(const std::string& text);

struct Member {
  std::shared_ptr<const Model> model;
  double weight = 1.0;
};

/// Per-class vote totals for one record.
struct VoteTally {
  /// sum_i w_i * I(h_i(x) = y)
  std::vector<double> votes;
  /// sum_i w_i * P_i(y | x)
  std::vector<double> probability_sums;
};

class EnsembleModel {
 public:
  EnsembleModel() = default;
  /// Throws InvalidArgument when empty, when a weight is not finite and
  /// positive, or when members disagree on features or classes.
  EnsembleModel(std::vector<Member> members, Aggregation aggregation, std::vector<std::string> class_order);

  const std::vector<Member>& members() const { return members_; }
  Aggregation aggregation() const { return aggregation_; }
  const std::vector<std::string>& class_order() const { return class_order_; }
  const std::vector<ColumnSpec>& features() const;

  VoteTally tally(const Record& record) const;
  /// Weighted indicator vote. Ties go to the larger probability sum, then
  /// to the earlier class.
  std::size_t vote(const Record& record) const;
  /// Weight-averaged member distributions.
  std::vector<double> distribution(const Record& record) const;

 private:
  std::vector<Member> members_;
  Aggregation aggregation_ = Aggregation::Majority;
  std::vector<std::string> class_order_;
};

/// Picks the winning class from a tally using the vote tie rules.
std::size_t resolve_vote(const VoteTally& tally);

/// A trained tree or ensemble, tagged with the learner that produced it.
class Model {
 public:
  Model(std::string kind, DecisionTree tree) : kind_(std::move(kind)), impl_(std::move(tree)) {}
  Model(std::string kind, EnsembleModel ensemble) : kind_(std::move(kind)), impl_(std::move(ensemble)) {}

  const std::string& kind() const { return kind_; }
  bool is_tree() const { return std::holds_alternative<DecisionTree>(impl_); }
  const DecisionTree& tree() const { return std::get<DecisionTree>(impl_); }
  const EnsembleModel& ensemble() const { return std::get<EnsembleModel>(impl_); }

  const std::vector<ColumnSpec>& features() const;
  const std::vector<std::string>& classes() const;

  std::size_t predict(const Record& record) const;
  std::vector<double> predict_dist(const Record& record) const;

 private:
  std::string kind_;
  std::variant<DecisionTree, EnsembleModel> impl_;
};

enum class LearnerKind { Cart, Chaid, ExhaustiveChaid, Boosted, RandomForest };

const char* to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& text);

struct BoostParams {
  std::size_t rounds = 50;
  std::size_t base_max_depth = 3;
  double learning_rate = 1.0;

  void validate() const;
};

struct ForestParams {
  std::size_t n_trees = 100;
  /// 0 selects ceil(sqrt(feature count)).
  std::size_t mtry = 0;
  /// Test hook: false trains every tree on the full training set.
  bool bootstrap = true;

  void validate(std::size_t feature_count) const;
};

std::size_t default_mtry(std::size_t feature_count);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::Cart;
  TreeParams tree = TreeParams::cart_defaults();
  BoostParams boost;
  ForestParams forest;

  static LearnerSpec defaults_for(LearnerKind kind);
};

/// Trains any learner kind. Tree learners ignore the rng.
std::shared_ptr<const Model> train_learner(const LearnerSpec& spec, const Dataset& train, const SeededRng& rng,
                                           bool parallel = false);

struct BagOptions {
  /// Test hook: false gives every member the identity sample.
  bool bootstrap = true;
  bool parallel = false;
};

/// Row samples used by bag(): sample i is drawn with derive_rng(rng, i).
std::vector<BootstrapSample> bag_samples(std::size_t rows, std::size_t members, const SeededRng& rng,
                                         bool bootstrap = true);

/// Member i trains on bag_samples()[i] with weight 1; majority vote. Base
/// learners that need randomness continue member i's stream after its draws.
Model bag(const LearnerSpec& base, const Dataset& train, std::size_t members, const SeededRng& rng,
          const BagOptions& options = {});

/// Per-round record of a boosting run.
struct BoostTrace {
  std::vector<double> errors;
  std::vector<double> alphas;
  /// Sum of row weights after each kept round's renormalisation.
  std::vector<double> weight_sums;
};

/// SAMME: alpha_m = learning_rate * (ln((1 - e_m) / e_m) + ln(K - 1)).
/// A round with e_m >= 1 - 1/K is discarded and ends training; a round with
/// e_m = 0 is kept with alpha capped at ln(1e10) and ends training.
/// The rng is accepted for interface symmetry; SAMME over deterministic CART
/// draws nothing.
Model train_boosted(const Dataset& train, const BoostParams& params, const SeededRng& rng,
                    BoostTrace* trace = nullptr);

double samme_alpha(double error, std::size_t classes, double learning_rate);

/// Fully grown CART trees on bootstraps; each split considers mtry features
/// sampled afresh per node. Tree i uses derive_rng(rng, i).
Model train_random_forest(const Dataset& train, const ForestParams& params, const SeededRng& rng,
                          bool parallel = false);

/// Heterogeneous majority vote over already-trained models sharing features
/// and classes.
Model committee(const std::vector<std::shared_ptr<const Model>>& models);

}  // namespace treevote
