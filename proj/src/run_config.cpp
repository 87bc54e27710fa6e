#include "als/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "als/error.hpp"

namespace als {

namespace {

using json = nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string convention_name(QuantileConvention c) {
  return c == QuantileConvention::UpperTail ? "upper_tail" : "literal";
}

}  // namespace

std::string_view to_string(SearchPreset p) {
  switch (p) {
    case SearchPreset::Full: return "full";
    case SearchPreset::Reduced: return "reduced";
    case SearchPreset::Single: return "single";
  }
  return "reduced";
}

SearchPreset parse_search_preset(std::string_view s) {
  if (s == "full") return SearchPreset::Full;
  if (s == "reduced") return SearchPreset::Reduced;
  if (s == "single" || s == "single-point") return SearchPreset::Single;
  throw Error(ErrorCode::InvalidArgument, "unknown search space '" + std::string(s) + "'");
}

void validate(const RunConfig& cfg) {
  ingest::validate(cfg.ingest);
  if (!(cfg.p_c > 0.0 && cfg.p_c < 1.0)) throw Error(ErrorCode::InvalidProbability, "pc must lie in (0,1)");
  if (!(cfg.beta_lo > 0.0 && cfg.beta_lo < 0.5 && cfg.beta_hi > 0.5 && cfg.beta_hi < 1.0)) {
    throw Error(ErrorCode::InvalidQuantile, "quantiles must satisfy 0 < lo < 0.5 < hi < 1");
  }
  if (!(cfg.windows.slack_early >= 0.0) || !(cfg.windows.slack_late >= 0.0) || !(cfg.windows.k >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "window slacks and k must be non-negative");
  }
  validate(cfg.solver);
  if (cfg.train.k_folds < 2) throw Error(ErrorCode::InvalidArgument, "k_folds must be >= 2");
  if (cfg.train.n_rounds < 0 || cfg.train.min_leaf < 1) {
    throw Error(ErrorCode::InvalidArgument, "n_rounds must be >= 0 and min_leaf >= 1");
  }
  if (cfg.synth.flights < 1) throw Error(ErrorCode::InvalidArgument, "synth.flights must be >= 1");
  if (cfg.utc_offset_min && (*cfg.utc_offset_min < -14 * 60 || *cfg.utc_offset_min > 14 * 60)) {
    throw Error(ErrorCode::InvalidArgument, "utc_offset_min out of range");
  }
}

RunConfig run_config_from_json(const json& j) {
  check_keys(j,
             {"paths", "airport", "radii_nm", "quantiles", "pc", "slack_s", "window_k", "convention",
              "reference_matrix", "solver", "seed", "utc_offset_min", "synth", "train", "schedule"},
             "config");
  if (!j.contains("seed")) throw Error(ErrorCode::InvalidArgument, "config must set 'seed'");
  RunConfig c;
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    check_keys(p, {"tracks", "events", "weather", "features", "model_dir", "output_dir"}, "paths");
    read(p, "tracks", c.paths.tracks);
    read(p, "events", c.paths.events);
    read(p, "weather", c.paths.weather);
    read(p, "features", c.paths.features);
    read(p, "model_dir", c.paths.model_dir);
    read(p, "output_dir", c.paths.output_dir);
  }
  if (j.contains("airport")) {
    const auto& a = j.at("airport");
    check_keys(a, {"lat", "lon"}, "airport");
    read(a, "lat", c.ingest.airport.lat_deg);
    read(a, "lon", c.ingest.airport.lon_deg);
  }
  if (j.contains("radii_nm")) {
    const auto& r = j.at("radii_nm");
    check_keys(r, {"outer", "entry", "final"}, "radii_nm");
    read(r, "outer", c.ingest.outer_radius_nm);
    read(r, "entry", c.ingest.entry_radius_nm);
    read(r, "final", c.ingest.final_radius_nm);
  }
  if (j.contains("quantiles")) {
    const auto q = j.at("quantiles").get<std::vector<double>>();
    if (q.size() != 2) throw Error(ErrorCode::InvalidArgument, "quantiles must be [lo, hi]");
    c.beta_lo = q[0];
    c.beta_hi = q[1];
  }
  read(j, "pc", c.p_c);
  if (j.contains("slack_s")) {
    const auto& s = j.at("slack_s");
    check_keys(s, {"early", "late"}, "slack_s");
    read(s, "early", c.windows.slack_early);
    read(s, "late", c.windows.slack_late);
  }
  read(j, "window_k", c.windows.k);
  if (j.contains("convention")) {
    const auto v = j.at("convention").get<std::string>();
    if (v == "upper_tail") {
      c.convention = QuantileConvention::UpperTail;
    } else if (v == "literal") {
      c.convention = QuantileConvention::Literal;
    } else {
      throw Error(ErrorCode::InvalidArgument, "convention must be 'upper_tail' or 'literal'");
    }
  }
  if (j.contains("reference_matrix") && !j.at("reference_matrix").is_null()) {
    c.reference_matrix = j.at("reference_matrix").get<std::string>();
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    check_keys(s, {"n_max", "time_limit_s", "gap", "tie_break", "depot_out", "depot_in"}, "solver");
    read(s, "n_max", c.solver.n_max);
    read(s, "time_limit_s", c.solver.time_limit_s);
    read(s, "gap", c.solver.gap);
    read(s, "depot_out", c.solver.depot_out);
    read(s, "depot_in", c.solver.depot_in);
    if (s.contains("tie_break") && s.at("tie_break").get<std::string>() != "entry_order") {
      throw Error(ErrorCode::InvalidArgument, "tie_break supports only 'entry_order'");
    }
  }
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("utc_offset_min") && !j.at("utc_offset_min").is_null()) {
    c.utc_offset_min = j.at("utc_offset_min").get<int>();
  }
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    check_keys(s, {"flights", "congestion", "medium_only"}, "synth");
    read(s, "flights", c.synth.flights);
    if (s.contains("congestion")) c.synth.congestion = synth::parse_congestion(s.at("congestion").get<std::string>());
    read(s, "medium_only", c.synth.medium_only);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    check_keys(t,
               {"space", "single", "k_folds", "n_rounds", "min_leaf", "merge_stages", "mu", "use_events",
                "use_weather", "ablation", "threads"},
               "train");
    if (t.contains("space")) c.train.space = parse_search_preset(t.at("space").get<std::string>());
    if (t.contains("single")) {
      const auto& h = t.at("single");
      check_keys(h, {"learn_rate", "max_depth", "sample_rate", "col_sample_rate"}, "train.single");
      read(h, "learn_rate", c.train.single.learn_rate);
      read(h, "max_depth", c.train.single.max_depth);
      read(h, "sample_rate", c.train.single.sample_rate);
      read(h, "col_sample_rate", c.train.single.col_sample_rate);
    }
    read(t, "k_folds", c.train.k_folds);
    read(t, "n_rounds", c.train.n_rounds);
    read(t, "min_leaf", c.train.min_leaf);
    read(t, "merge_stages", c.train.merge_stages);
    if (t.contains("mu")) {
      const auto v = t.at("mu").get<std::string>();
      if (v != "median" && v != "mean") throw Error(ErrorCode::InvalidArgument, "train.mu must be median or mean");
      c.train.mu = v == "mean" ? MuSource::Mean : MuSource::Median;
    }
    read(t, "use_events", c.train.use_events);
    read(t, "use_weather", c.train.use_weather);
    if (t.contains("ablation")) {
      for (const auto& g : t.at("ablation").get<std::vector<std::string>>()) {
        if (g == "events") {
          c.train.ablate_events = true;
        } else if (g == "weather") {
          c.train.ablate_weather = true;
        } else {
          throw Error(ErrorCode::InvalidArgument, "ablation groups are 'events' and 'weather'");
        }
      }
    }
    read(t, "threads", c.train.threads);
  }
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    check_keys(s, {"start_index", "max_blocks"}, "schedule");
    read(s, "start_index", c.schedule.start_index);
    read(s, "max_blocks", c.schedule.max_blocks);
  }
  validate(c);
  return c;
}

json to_json(const RunConfig& c) {
  json ablation = json::array();
  if (c.train.ablate_events) ablation.push_back("events");
  if (c.train.ablate_weather) ablation.push_back("weather");
  return {
      {"paths",
       {{"tracks", c.paths.tracks},
        {"events", c.paths.events},
        {"weather", c.paths.weather},
        {"features", c.paths.features},
        {"model_dir", c.paths.model_dir},
        {"output_dir", c.paths.output_dir}}},
      {"airport", {{"lat", c.ingest.airport.lat_deg}, {"lon", c.ingest.airport.lon_deg}}},
      {"radii_nm",
       {{"outer", c.ingest.outer_radius_nm}, {"entry", c.ingest.entry_radius_nm}, {"final", c.ingest.final_radius_nm}}},
      {"quantiles", {c.beta_lo, c.beta_hi}},
      {"pc", c.p_c},
      {"slack_s", {{"early", c.windows.slack_early}, {"late", c.windows.slack_late}}},
      {"window_k", c.windows.k},
      {"convention", convention_name(c.convention)},
      {"reference_matrix", c.reference_matrix ? json(*c.reference_matrix) : json(nullptr)},
      {"solver",
       {{"n_max", c.solver.n_max},
        {"time_limit_s", c.solver.time_limit_s},
        {"gap", c.solver.gap},
        {"tie_break", "entry_order"},
        {"depot_out", c.solver.depot_out},
        {"depot_in", c.solver.depot_in}}},
      {"seed", c.seed},
      {"utc_offset_min", c.utc_offset_min ? json(*c.utc_offset_min) : json(nullptr)},
      {"synth",
       {{"flights", c.synth.flights},
        {"congestion", synth::to_string(c.synth.congestion)},
        {"medium_only", c.synth.medium_only}}},
      {"train",
       {{"space", to_string(c.train.space)},
        {"single",
         {{"learn_rate", c.train.single.learn_rate},
          {"max_depth", c.train.single.max_depth},
          {"sample_rate", c.train.single.sample_rate},
          {"col_sample_rate", c.train.single.col_sample_rate}}},
        {"k_folds", c.train.k_folds},
        {"n_rounds", c.train.n_rounds},
        {"min_leaf", c.train.min_leaf},
        {"merge_stages", c.train.merge_stages},
        {"mu", c.train.mu == MuSource::Mean ? "mean" : "median"},
        {"use_events", c.train.use_events},
        {"use_weather", c.train.use_weather},
        {"ablation", ablation},
        {"threads", c.train.threads}}},
      {"schedule", {{"start_index", c.schedule.start_index}, {"max_blocks", c.schedule.max_blocks}}},
  };
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  return run_config_from_json(j);
}

SeparationParams separation_params(const RunConfig& cfg) {
  SeparationParams p;
  p.p_c = cfg.p_c;
  p.windows = cfg.windows;
  p.convention = cfg.convention;
  if (cfg.reference_matrix) {
    std::ifstream in(*cfg.reference_matrix);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open reference matrix " + *cfg.reference_matrix);
    try {
      p.reference = reference_matrix_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw ParseError(*cfg.reference_matrix, 0, e.what());
    }
  }
  return p;
}

StagedConfig staged_config(const RunConfig& cfg) {
  StagedConfig s;
  s.beta_lo = cfg.beta_lo;
  s.beta_hi = cfg.beta_hi;
  s.mu_source = cfg.train.mu;
  s.use_events = cfg.train.use_events;
  s.use_weather = cfg.train.use_weather;
  s.merge_underpopulated = cfg.train.merge_stages;
  return s;
}

}  // namespace als
