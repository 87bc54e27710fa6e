#include "als/staged.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "als/normal.hpp"

namespace als {

StageUnderpopulated::StageUnderpopulated(ingest::Stage stage, std::size_t rows)
    : Error(ErrorCode::StageUnderpopulated,
            "stage " + std::string(ingest::to_string(stage)) + " has " + std::to_string(rows) +
                " training rows; pass --merge-stages to fold it into a neighboring stage"),
      stage_(stage) {}

std::vector<std::size_t> model_columns(bool use_events, bool use_weather) {
  std::vector<std::size_t> out;
  const auto& schema = feature_schema();
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    const auto g = schema[c].group;
    if (g == FeatureGroup::Events && !use_events) continue;
    if (g == FeatureGroup::Weather && !use_weather) continue;
    out.push_back(c);
  }
  return out;
}

gbm::Schema projected_schema(std::span<const std::size_t> columns) {
  gbm::Schema s;
  for (auto c : columns) {
    const auto& spec = feature_schema().at(c);
    s.columns.push_back({std::string(spec.name), spec.kind});
  }
  return s;
}

std::vector<double> project(const FeatureVector& fv, std::span<const std::size_t> columns) {
  std::vector<double> out;
  out.reserve(columns.size());
  for (auto c : columns) out.push_back(fv[c]);
  return out;
}

gbm::Dataset make_dataset(std::span<const Flight> flights, std::span<const std::size_t> columns) {
  gbm::Dataset d;
  d.schema = projected_schema(columns);
  d.x.reserve(flights.size() * columns.size());
  d.y.reserve(flights.size());
  for (const auto& f : flights) {
    if (!f.observed_duration) throw Error(ErrorCode::InvalidArgument, "flight " + f.id + " has no label");
    d.add_row(project(f.features, columns), *f.observed_duration);
  }
  return d;
}

namespace {

QuantileTriple fit_triple(const gbm::Dataset& data, const gbm::Hyperparams& hp, const StagedConfig& cfg,
                          std::uint64_t seed) {
  QuantileTriple t;
  t.lo = gbm::fit(data, hp, gbm::Loss::quantile(cfg.beta_lo), seed);
  t.mid = gbm::fit(data, hp, cfg.mu_source == MuSource::Median ? gbm::Loss::quantile(0.5) : gbm::Loss::squared(),
                   seed + 1);
  t.hi = gbm::fit(data, hp, gbm::Loss::quantile(cfg.beta_hi), seed + 2);
  return t;
}

void check_config(const StagedConfig& cfg) {
  if (!(cfg.beta_lo > 0.0 && cfg.beta_lo < 0.5 && cfg.beta_hi > 0.5 && cfg.beta_hi < 1.0)) {
    throw Error(ErrorCode::InvalidQuantile, "quantile pair must satisfy 0 < lo < 0.5 < hi < 1");
  }
}

}  // namespace

StagedPredictor fit_staged(std::span<const Flight> flights, const std::array<gbm::Hyperparams, 3>& hp,
                           const StagedConfig& cfg, std::uint64_t seed) {
  check_config(cfg);
  std::array<std::vector<Flight>, 3> by_stage;
  for (const auto& f : flights) by_stage[static_cast<std::size_t>(ingest::assign_stage(f.features))].push_back(f);

  std::array<bool, 3> populated{};
  for (std::size_t s = 0; s < 3; ++s) {
    populated[s] = by_stage[s].size() >= std::max<std::size_t>(2, cfg.min_stage_rows);
    if (!populated[s] && !cfg.merge_underpopulated) throw StageUnderpopulated(ingest::kStages[s], by_stage[s].size());
  }
  if (!populated[0] && !populated[1] && !populated[2]) {
    throw Error(ErrorCode::EmptyData, "no stage has enough rows to train");
  }

  StagedPredictor sp;
  sp.config = cfg;
  sp.columns = model_columns(cfg.use_events, cfg.use_weather);
  sp.conditioned = true;

  // Unpopulated stages borrow their rows' nearest trained neighbor.
  std::array<int, 3> owner{};
  for (int s = 0; s < 3; ++s) {
    if (populated[static_cast<std::size_t>(s)]) {
      owner[static_cast<std::size_t>(s)] = s;
      continue;
    }
    int best = -1;
    for (int t = 0; t < 3; ++t) {
      if (!populated[static_cast<std::size_t>(t)]) continue;
      if (best < 0 || std::abs(t - s) < std::abs(best - s)) best = t;
    }
    owner[static_cast<std::size_t>(s)] = best;
  }
  std::array<std::vector<Flight>, 3> rows;
  for (std::size_t s = 0; s < 3; ++s) {
    auto& dst = rows[static_cast<std::size_t>(owner[s])];
    dst.insert(dst.end(), by_stage[s].begin(), by_stage[s].end());
    if (owner[s] != static_cast<int>(s)) {
      sp.notes.push_back("stage " + std::string(ingest::to_string(ingest::kStages[s])) + " (" +
                         std::to_string(by_stage[s].size()) + " rows) merged into stage " +
                         std::string(ingest::to_string(ingest::kStages[static_cast<std::size_t>(owner[s])])));
    }
  }
  std::array<std::size_t, 3> model_of{};
  for (std::size_t s = 0; s < 3; ++s) {
    if (!populated[s]) continue;
    // Keep rows in input order regardless of merges.
    std::stable_sort(rows[s].begin(), rows[s].end(), [](const Flight& a, const Flight& b) {
      return a.entry_time < b.entry_time || (a.entry_time == b.entry_time && a.id < b.id);
    });
    const auto data = make_dataset(rows[s], sp.columns);
    model_of[s] = sp.models.size();
    sp.models.push_back(fit_triple(data, hp[s], cfg, seed + 10 * (s + 1)));
  }
  for (std::size_t s = 0; s < 3; ++s) sp.route[s] = model_of[static_cast<std::size_t>(owner[s])];
  return sp;
}

StagedPredictor fit_unconditioned(std::span<const Flight> flights, const gbm::Hyperparams& hp,
                                  const StagedConfig& cfg, std::uint64_t seed) {
  check_config(cfg);
  StagedPredictor sp;
  sp.config = cfg;
  sp.columns = model_columns(cfg.use_events, cfg.use_weather);
  sp.conditioned = false;
  sp.models.push_back(fit_triple(make_dataset(flights, sp.columns), hp, cfg, seed));
  sp.route = {0, 0, 0};
  return sp;
}

double sigma_from_quantiles(double q_lo, double q_hi, double beta_lo, double beta_hi) {
  if (q_hi <= q_lo) return 0.0;
  return (q_hi - q_lo) / (normal_quantile(beta_hi) - normal_quantile(beta_lo));
}

EtaDistribution predict_eta(const StagedPredictor& sp, const FeatureVector& fv) {
  const auto stage = static_cast<std::size_t>(ingest::assign_stage(fv));
  const auto& triple = sp.models.at(sp.route[stage]);
  const auto row = project(fv, sp.columns);
  std::array<double, 3> q{gbm::predict(triple.lo, row), gbm::predict(triple.mid, row), gbm::predict(triple.hi, row)};

  EtaDistribution eta;
  if (sp.config.mu_source == MuSource::Median) {
    std::sort(q.begin(), q.end());
    eta.quantiles = {{sp.config.beta_lo, q[0]}, {0.5, q[1]}, {sp.config.beta_hi, q[2]}};
    eta.mu = q[1];
  } else {
    const double lo = std::min(q[0], q[2]);
    const double hi = std::max(q[0], q[2]);
    eta.quantiles = {{sp.config.beta_lo, lo}, {sp.config.beta_hi, hi}};
    eta.mu = std::clamp(q[1], lo, hi);
  }
  eta.sigma = sigma_from_quantiles(eta.quantiles.begin()->second, eta.quantiles.rbegin()->second, sp.config.beta_lo,
                                   sp.config.beta_hi);
  return eta;
}

std::vector<double> predict_mu(const StagedPredictor& sp, std::span<const Flight> flights) {
  std::vector<double> out;
  out.reserve(flights.size());
  for (const auto& f : flights) out.push_back(predict_eta(sp, f.features).mu);
  return out;
}

nlohmann::json to_json(const StagedPredictor& sp) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& t : sp.models) {
    models.push_back({{"lo", gbm::to_json(t.lo)}, {"mid", gbm::to_json(t.mid)}, {"hi", gbm::to_json(t.hi)}});
  }
  return {
      {"format", "als-staged"},
      {"version", 1},
      {"conditioned", sp.conditioned},
      {"beta_lo", sp.config.beta_lo},
      {"beta_hi", sp.config.beta_hi},
      {"mu_source", sp.config.mu_source == MuSource::Median ? "median" : "mean"},
      {"use_events", sp.config.use_events},
      {"use_weather", sp.config.use_weather},
      {"columns", sp.columns},
      {"route", sp.route},
      {"notes", sp.notes},
      {"models", models},
  };
}

StagedPredictor staged_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "als-staged" || j.value("version", 0) != 1) {
    throw Error(ErrorCode::InvalidArgument, "not a version 1 staged model");
  }
  StagedPredictor sp;
  sp.conditioned = j.at("conditioned").get<bool>();
  sp.config.beta_lo = j.at("beta_lo").get<double>();
  sp.config.beta_hi = j.at("beta_hi").get<double>();
  sp.config.mu_source = j.at("mu_source").get<std::string>() == "mean" ? MuSource::Mean : MuSource::Median;
  sp.config.use_events = j.at("use_events").get<bool>();
  sp.config.use_weather = j.at("use_weather").get<bool>();
  check_config(sp.config);
  sp.columns = j.at("columns").get<std::vector<std::size_t>>();
  if (sp.columns != model_columns(sp.config.use_events, sp.config.use_weather)) {
    throw Error(ErrorCode::SchemaMismatch, "staged model column list does not match its feature flags");
  }
  sp.route = j.at("route").get<std::array<std::size_t, 3>>();
  sp.notes = j.at("notes").get<std::vector<std::string>>();
  const auto schema = projected_schema(sp.columns);
  for (const auto& m : j.at("models")) {
    sp.models.push_back({gbm::ensemble_from_json(m.at("lo"), &schema), gbm::ensemble_from_json(m.at("mid"), &schema),
                         gbm::ensemble_from_json(m.at("hi"), &schema)});
  }
  for (auto r : sp.route) {
    if (r >= sp.models.size()) throw Error(ErrorCode::InvalidArgument, "stage route points past the model list");
  }
  return sp;
}

}  // namespace als
