#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "als/gbm/dataset.hpp"
#include "als/gbm/tree.hpp"

namespace als::gbm {

struct Loss {
  enum class Kind : std::uint8_t { Squared, Quantile };
  Kind kind = Kind::Squared;
  double beta = 0.5;

  static Loss squared() { return {Kind::Squared, 0.5}; }
  static Loss quantile(double beta) { return {Kind::Quantile, beta}; }

  friend bool operator==(const Loss&, const Loss&) = default;
};

/// Per-row loss value.
double loss_value(const Loss& loss, double y, double f);
/// Negative gradient of the loss at prediction f. For the pinball loss this
/// is beta*[y >= f] - (1 - beta)*[y <= f].
double pseudo_residual(const Loss& loss, double y, double f);
/// Mean loss of predictions over a dataset.
double mean_loss(const Loss& loss, std::span<const double> y, std::span<const double> f);

/// Smallest q with (#{y <= q} / n) >= beta.
double empirical_quantile(std::vector<double> values, double beta);

struct Hyperparams {
  double learn_rate = 0.1;
  int max_depth = 7;
  double sample_rate = 1.0;      // row subsample, without replacement
  double col_sample_rate = 0.8;  // feature subsample per tree
  int n_rounds = 200;
  std::size_t min_leaf = 5;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Additive tree model: prediction = base + learn_rate * sum of tree outputs.
struct BoostedEnsemble {
  Schema schema;
  Loss loss;
  Hyperparams hyperparams;
  double base_prediction = 0.0;
  double learn_rate = 0.1;
  std::vector<RegressionTree> trees;
  std::uint64_t seed = 0;
};

struct EarlyStopping {
  const Dataset* validation = nullptr;
  int patience = 0;  // rounds without RMSLE improvement before stopping
};

BoostedEnsemble fit(const Dataset& data, const Hyperparams& hp, const Loss& loss, std::uint64_t seed,
                    const EarlyStopping& early_stopping = {});

double predict(const BoostedEnsemble& ens, std::span<const double> row);
std::vector<double> predict_all(const BoostedEnsemble& ens, const Dataset& data);

/// Split gain per column, normalized to sum to one (all zeros when the
/// ensemble has no splits).
std::map<std::string, double> feature_importance(const BoostedEnsemble& ens);

struct SearchSpace {
  std::vector<double> learn_rate;
  std::vector<int> max_depth;
  std::vector<double> sample_rate;
  std::vector<double> col_sample_rate;
  int n_rounds = 200;
  std::size_t min_leaf = 5;

  /// learn_rate {0.05, 0.1} x max_depth 7..12 x sample_rate {0.8, 1.0} x
  /// col_sample_rate {0.5, 0.6, 0.7, 0.8}.
  static SearchSpace full();
  /// 8-point subset for quick runs.
  static SearchSpace reduced();
  static SearchSpace single(const Hyperparams& hp);

  std::vector<Hyperparams> candidates() const;
};

struct CandidateScore {
  Hyperparams hp;
  double cv_rmsle = 0.0;
};

struct GridSearchResult {
  Hyperparams best;
  double best_score = 0.0;
  std::vector<CandidateScore> evaluated;  // in enumeration order
};

/// Exhaustive k-fold search minimizing mean validation RMSLE. Ties go to the
/// smaller max_depth, then the smaller learn_rate. Candidates run on up to
/// `threads` workers; results do not depend on the thread count.
GridSearchResult grid_search(const Dataset& data, const SearchSpace& space, std::size_t k_folds, const Loss& loss,
                             std::uint64_t seed, unsigned threads = 0);

nlohmann::json to_json(const BoostedEnsemble& ens);
/// Throws SchemaMismatch when the stored schema hash does not match the
/// stored columns, or when `expected` is given and differs.
BoostedEnsemble ensemble_from_json(const nlohmann::json& j, const Schema* expected = nullptr);

}  // namespace als::gbm
