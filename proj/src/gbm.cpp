#include "als/gbm/gbm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "als/error.hpp"
#include "als/gbm/metrics.hpp"
#include "als/rng.hpp"

namespace als::gbm {

double loss_value(const Loss& loss, double y, double f) {
  if (loss.kind == Loss::Kind::Squared) return 0.5 * (y - f) * (y - f);
  return y >= f ? loss.beta * (y - f) : (1.0 - loss.beta) * (f - y);
}

double pseudo_residual(const Loss& loss, double y, double f) {
  if (loss.kind == Loss::Kind::Squared) return y - f;
  return loss.beta * (y >= f ? 1.0 : 0.0) - (1.0 - loss.beta) * (y <= f ? 1.0 : 0.0);
}

double mean_loss(const Loss& loss, std::span<const double> y, std::span<const double> f) {
  if (y.size() != f.size() || y.empty()) throw Error(ErrorCode::LengthMismatch, "mean_loss length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += loss_value(loss, y[i], f[i]);
  return s / static_cast<double>(y.size());
}

double empirical_quantile(std::vector<double> values, double beta) {
  if (values.empty()) throw Error(ErrorCode::EmptyData, "quantile of empty set");
  const auto n = values.size();
  auto k = static_cast<std::size_t>(std::ceil(beta * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

namespace {

void validate_inputs(const Dataset& data, const Hyperparams& hp, const Loss& loss) {
  if (data.rows() < 2) throw Error(ErrorCode::EmptyData, "fit needs at least 2 rows");
  if (data.x.size() != data.rows() * data.cols()) throw Error(ErrorCode::SchemaMismatch, "design matrix shape");
  for (double v : data.y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteLabel, "label is not finite");
  }
  if (loss.kind == Loss::Kind::Quantile && !(loss.beta > 0.0 && loss.beta < 1.0)) {
    throw Error(ErrorCode::InvalidQuantile, "quantile level must lie in (0,1)");
  }
  if (!(hp.learn_rate > 0.0) || hp.max_depth < 0 || !(hp.sample_rate > 0.0 && hp.sample_rate <= 1.0) ||
      !(hp.col_sample_rate > 0.0 && hp.col_sample_rate <= 1.0) || hp.n_rounds < 0 || hp.min_leaf < 1) {
    throw Error(ErrorCode::InvalidArgument, "hyperparameters out of range");
  }
}

double safe_rmsle(std::span<const double> y, std::span<const double> f) {
  try {
    return rmsle(y, f);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

BoostedEnsemble fit(const Dataset& data, const Hyperparams& hp, const Loss& loss, std::uint64_t seed,
                    const EarlyStopping& early_stopping) {
  validate_inputs(data, hp, loss);
  const std::size_t n = data.rows();
  const std::size_t n_cols = data.cols();

  BoostedEnsemble ens;
  ens.schema = data.schema;
  ens.loss = loss;
  ens.hyperparams = hp;
  ens.learn_rate = hp.learn_rate;
  ens.seed = seed;
  if (loss.kind == Loss::Kind::Squared) {
    double s = 0.0;
    for (double v : data.y) s += v;
    ens.base_prediction = s / static_cast<double>(n);
  } else {
    ens.base_prediction = empirical_quantile(data.y, loss.beta);
  }

  std::vector<double> current(n, ens.base_prediction);
  const PresortedColumns presorted(data);
  Rng rng(seed);

  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
  std::vector<std::size_t> all_cols(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) all_cols[c] = c;

  std::vector<double> gradient(n, 0.0);
  std::vector<double> scratch;
  const LeafValueFn leaf_value = [&](std::span<const std::size_t> rows) {
    if (loss.kind == Loss::Kind::Squared) {
      double s = 0.0;
      for (auto r : rows) s += data.y[r] - current[r];
      return s / static_cast<double>(rows.size());
    }
    scratch.clear();
    for (auto r : rows) scratch.push_back(data.y[r] - current[r]);
    return empirical_quantile(scratch, loss.beta);
  };

  const TreeParams tree_params{hp.max_depth, hp.min_leaf};
  const Dataset* val = early_stopping.validation;
  const bool stopping = val != nullptr && early_stopping.patience > 0 && val->rows() > 0;
  std::vector<double> val_pred;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_rounds = 0;
  if (stopping) {
    if (!(val->schema == data.schema)) throw Error(ErrorCode::SchemaMismatch, "validation schema differs");
    val_pred.assign(val->rows(), ens.base_prediction);
    best_val = safe_rmsle(val->y, val_pred);
  }

  for (int m = 0; m < hp.n_rounds; ++m) {
    std::vector<std::size_t> rows;
    if (hp.sample_rate < 1.0) {
      const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hp.sample_rate * static_cast<double>(n))));
      rows = rng.sample_without_replacement(n, k);
    } else {
      rows = all_rows;
    }
    std::vector<std::size_t> cols;
    if (hp.col_sample_rate < 1.0) {
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(hp.col_sample_rate * static_cast<double>(n_cols))));
      cols = rng.sample_without_replacement(n_cols, k);
    } else {
      cols = all_cols;
    }
    for (auto r : rows) gradient[r] = pseudo_residual(loss, data.y[r], current[r]);

    RegressionTree tree = grow_tree(data, presorted, rows, gradient, cols, tree_params, leaf_value);
    for (std::size_t i = 0; i < n; ++i) current[i] += hp.learn_rate * tree.predict(data.row(i));
    ens.trees.push_back(std::move(tree));

    if (stopping) {
      for (std::size_t i = 0; i < val->rows(); ++i) val_pred[i] += hp.learn_rate * ens.trees.back().predict(val->row(i));
      const double score = safe_rmsle(val->y, val_pred);
      if (score < best_val) {
        best_val = score;
        best_rounds = ens.trees.size();
      } else if (ens.trees.size() - best_rounds >= static_cast<std::size_t>(early_stopping.patience)) {
        break;
      }
    }
  }
  if (stopping) ens.trees.resize(best_rounds);
  return ens;
}

double predict(const BoostedEnsemble& ens, std::span<const double> row) {
  if (row.size() != ens.schema.size()) {
    throw Error(ErrorCode::SchemaMismatch, "row has " + std::to_string(row.size()) + " values, model expects " +
                                               std::to_string(ens.schema.size()));
  }
  double s = 0.0;
  for (const auto& t : ens.trees) s += t.predict(row);
  return ens.base_prediction + ens.learn_rate * s;
}

std::vector<double> predict_all(const BoostedEnsemble& ens, const Dataset& data) {
  if (!(data.schema == ens.schema)) throw Error(ErrorCode::SchemaMismatch, "dataset schema differs from model");
  std::vector<double> out(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = predict(ens, data.row(i));
  return out;
}

std::map<std::string, double> feature_importance(const BoostedEnsemble& ens) {
  std::vector<double> gain(ens.schema.size(), 0.0);
  for (const auto& t : ens.trees) {
    for (const auto& node : t.nodes()) {
      if (!node.is_leaf()) gain[static_cast<std::size_t>(node.feature)] += node.gain;
    }
  }
  double total = 0.0;
  for (double g : gain) total += g;
  std::map<std::string, double> out;
  for (std::size_t c = 0; c < gain.size(); ++c) {
    out[ens.schema.columns[c].name] = total > 0.0 ? gain[c] / total : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid search

SearchSpace SearchSpace::full() {
  return SearchSpace{{0.05, 0.1}, {7, 8, 9, 10, 11, 12}, {0.8, 1.0}, {0.5, 0.6, 0.7, 0.8}, 200, 5};
}

SearchSpace SearchSpace::reduced() { return SearchSpace{{0.05, 0.1}, {7, 8}, {0.8, 1.0}, {0.8}, 200, 5}; }

SearchSpace SearchSpace::single(const Hyperparams& hp) {
  return SearchSpace{{hp.learn_rate}, {hp.max_depth}, {hp.sample_rate}, {hp.col_sample_rate}, hp.n_rounds, hp.min_leaf};
}

std::vector<Hyperparams> SearchSpace::candidates() const {
  std::vector<Hyperparams> out;
  for (double lr : learn_rate) {
    for (int depth : max_depth) {
      for (double sr : sample_rate) {
        for (double cr : col_sample_rate) {
          out.push_back(Hyperparams{lr, depth, sr, cr, n_rounds, min_leaf});
        }
      }
    }
  }
  return out;
}

GridSearchResult grid_search(const Dataset& data, const SearchSpace& space, std::size_t k_folds, const Loss& loss,
                             std::uint64_t seed, unsigned threads) {
  if (data.rows() == 0) throw Error(ErrorCode::EmptyData, "grid search on empty data");
  if (k_folds < 2) throw Error(ErrorCode::InvalidArgument, "k_folds must be >= 2");
  if (data.rows() < 2 * k_folds) throw Error(ErrorCode::EmptyData, "too few rows for the requested folds");
  const auto candidates = space.candidates();
  if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "empty search space");

  std::vector<std::size_t> perm(data.rows());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng rng(seed);
  rng.shuffle(perm);
  std::vector<Dataset> train_folds;
  std::vector<Dataset> valid_folds;
  for (std::size_t k = 0; k < k_folds; ++k) {
    std::vector<std::size_t> tr;
    std::vector<std::size_t> va;
    for (std::size_t i = 0; i < perm.size(); ++i) (i % k_folds == k ? va : tr).push_back(perm[i]);
    std::sort(tr.begin(), tr.end());
    std::sort(va.begin(), va.end());
    train_folds.push_back(data.subset(tr));
    valid_folds.push_back(data.subset(va));
  }

  std::vector<CandidateScore> scores(candidates.size());
  auto evaluate = [&](std::size_t c) {
    double total = 0.0;
    for (std::size_t k = 0; k < k_folds; ++k) {
      const auto ens = fit(train_folds[k], candidates[c], loss, seed + 1 + k);
      total += safe_rmsle(valid_folds[k].y, predict_all(ens, valid_folds[k]));
    }
    scores[c] = CandidateScore{candidates[c], total / static_cast<double>(k_folds)};
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(candidates.size()));
  if (threads <= 1) {
    for (std::size_t c = 0; c < candidates.size(); ++c) evaluate(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < candidates.size(); c = next++) {
          try {
            evaluate(c);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  GridSearchResult result;
  result.evaluated = scores;
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    const auto& a = scores[c];
    const auto& b = scores[best];
    if (a.cv_rmsle < b.cv_rmsle ||
        (a.cv_rmsle == b.cv_rmsle &&
         (a.hp.max_depth < b.hp.max_depth ||
          (a.hp.max_depth == b.hp.max_depth && a.hp.learn_rate < b.hp.learn_rate)))) {
      best = c;
    }
  }
  result.best = scores[best].hp;
  result.best_score = scores[best].cv_rmsle;
  return result;
}

// ---------------------------------------------------------------------------
// Model files

namespace {

constexpr int kModelVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::json node_json(const TreeNode& n) {
  if (n.is_leaf()) return {{"v", n.value}};
  nlohmann::json j{{"f", n.feature}, {"m", n.missing_left}, {"g", n.gain}};
  if (!n.left_categories.empty()) {
    j["c"] = n.left_categories;
  } else {
    j["t"] = n.threshold;
  }
  return j;
}

int parse_preorder(const nlohmann::json& arr, std::size_t& pos, std::vector<TreeNode>& out, std::size_t n_cols) {
  if (pos >= arr.size()) throw Error(ErrorCode::InvalidArgument, "truncated tree in model file");
  const auto& j = arr[pos++];
  const int index = static_cast<int>(out.size());
  out.emplace_back();
  if (j.contains("v")) {
    out.back().value = j.at("v").get<double>();
    return index;
  }
  TreeNode n;
  n.feature = j.at("f").get<int>();
  if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= n_cols) {
    throw Error(ErrorCode::SchemaMismatch, "tree references an unknown column");
  }
  n.missing_left = j.at("m").get<bool>();
  n.gain = j.at("g").get<double>();
  if (j.contains("c")) {
    n.left_categories = j.at("c").get<std::vector<int>>();
  } else {
    n.threshold = j.at("t").get<double>();
  }
  out[static_cast<std::size_t>(index)] = n;
  const int left = parse_preorder(arr, pos, out, n_cols);
  const int right = parse_preorder(arr, pos, out, n_cols);
  out[static_cast<std::size_t>(index)].left = left;
  out[static_cast<std::size_t>(index)].right = right;
  return index;
}

}  // namespace

nlohmann::json to_json(const BoostedEnsemble& ens) {
  nlohmann::json schema = nlohmann::json::array();
  for (const auto& c : ens.schema.columns) {
    schema.push_back({{"name", c.name}, {"kind", c.kind == FeatureKind::Categorical ? "categorical" : "numeric"}});
  }
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : ens.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes()) nodes.push_back(node_json(n));
    trees.push_back(std::move(nodes));
  }
  const auto& hp = ens.hyperparams;
  return {
      {"format", "als-gbm"},
      {"version", kModelVersion},
      {"schema", schema},
      {"schema_hash", hex64(ens.schema.hash())},
      {"loss", {{"kind", ens.loss.kind == Loss::Kind::Squared ? "squared" : "quantile"}, {"beta", ens.loss.beta}}},
      {"hyperparams",
       {{"learn_rate", hp.learn_rate},
        {"max_depth", hp.max_depth},
        {"sample_rate", hp.sample_rate},
        {"col_sample_rate", hp.col_sample_rate},
        {"n_rounds", hp.n_rounds},
        {"min_leaf", hp.min_leaf}}},
      {"base_prediction", ens.base_prediction},
      {"learn_rate", ens.learn_rate},
      {"seed", ens.seed},
      {"trees", trees},
  };
}

BoostedEnsemble ensemble_from_json(const nlohmann::json& j, const Schema* expected) {
  if (j.value("format", "") != "als-gbm") throw Error(ErrorCode::InvalidArgument, "not an als-gbm model");
  if (j.at("version").get<int>() != kModelVersion) throw Error(ErrorCode::InvalidArgument, "unsupported model version");
  BoostedEnsemble ens;
  for (const auto& c : j.at("schema")) {
    const auto kind = c.at("kind").get<std::string>();
    if (kind != "numeric" && kind != "categorical") throw Error(ErrorCode::SchemaMismatch, "unknown column kind");
    ens.schema.columns.push_back(
        {c.at("name").get<std::string>(), kind == "categorical" ? FeatureKind::Categorical : FeatureKind::Numeric});
  }
  if (j.at("schema_hash").get<std::string>() != hex64(ens.schema.hash())) {
    throw Error(ErrorCode::SchemaMismatch, "model schema hash does not match its column list");
  }
  if (expected && !(*expected == ens.schema)) {
    throw Error(ErrorCode::SchemaMismatch, "model was trained on a different feature schema");
  }
  const auto& loss = j.at("loss");
  ens.loss = loss.at("kind").get<std::string>() == "squared" ? Loss::squared() : Loss::quantile(loss.at("beta").get<double>());
  const auto& hp = j.at("hyperparams");
  ens.hyperparams = Hyperparams{hp.at("learn_rate").get<double>(), hp.at("max_depth").get<int>(),
                                hp.at("sample_rate").get<double>(), hp.at("col_sample_rate").get<double>(),
                                hp.at("n_rounds").get<int>(),       hp.at("min_leaf").get<std::size_t>()};
  ens.base_prediction = j.at("base_prediction").get<double>();
  ens.learn_rate = j.at("learn_rate").get<double>();
  ens.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& t : j.at("trees")) {
    std::vector<TreeNode> nodes;
    std::size_t pos = 0;
    parse_preorder(t, pos, nodes, ens.schema.size());
    if (pos != t.size()) throw Error(ErrorCode::InvalidArgument, "trailing nodes in tree");
    ens.trees.emplace_back(std::move(nodes));
  }
  return ens;
}

}  // namespace als::gbm
