#include "als/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>

#include "als/csv.hpp"
#include "als/error.hpp"
#include "als/gbm/metrics.hpp"
#include "als/milp_check.hpp"
#include "als/rng.hpp"

namespace als {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  return in;
}

std::string join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

std::string fixed(double v, int digits = 3) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::array<std::size_t, 3> stage_counts(std::span<const Flight> flights) {
  std::array<std::size_t, 3> c{};
  for (const auto& f : flights) ++c[static_cast<std::size_t>(ingest::assign_stage(f.features))];
  return c;
}

void print_stage_counts(std::ostream& out, std::span<const Flight> flights) {
  const auto c = stage_counts(flights);
  out << "stage I: " << c[0] << "\nstage II: " << c[1] << "\nstage III: " << c[2] << '\n';
}

std::vector<Flight> load_features(const std::string& path) {
  auto in = open_in(path);
  auto flights = ingest::read_features(in, path);
  const auto order = entry_order(flights);
  std::vector<Flight> sorted;
  sorted.reserve(flights.size());
  for (auto i : order) sorted.push_back(flights[i]);
  return sorted;
}

}  // namespace

std::string rejects_path(const std::string& features_path) {
  const fs::path p(features_path);
  return (p.parent_path() / (p.stem().string() + "_rejects.csv")).string();
}

std::string clock_string(double epoch_seconds, int offset_min) {
  auto t = static_cast<long long>(std::llround(epoch_seconds)) + 60LL * offset_min;
  t %= 86400;
  if (t < 0) t += 86400;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", t / 3600, (t / 60) % 60, t % 60);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  validate(cfg);
  synth::SynthOptions opts;
  opts.geometry = cfg.ingest;
  opts.medium_only = cfg.synth.medium_only;
  const auto sc = synth::generate_scenario(cfg.seed, cfg.synth.flights, cfg.synth.congestion, opts);
  {
    auto f = open_out(cfg.paths.tracks);
    ingest::write_tracks(f, sc.tracks);
  }
  {
    auto f = open_out(cfg.paths.events);
    ingest::write_events(f, sc.events);
  }
  {
    auto f = open_out(cfg.paths.weather);
    ingest::write_weather(f, sc.weather);
  }
  out << "wrote " << sc.tracks.size() << " flights, " << sc.events.size() << " events, " << sc.weather.size()
      << " weather hours\n";
  print_stage_counts(out, sc.flights);
  return kExitOk;
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate(cfg);
  std::vector<ingest::TrackedFlight> tracks;
  std::vector<ingest::FlightEvent> events;
  ingest::WeatherTable weather;
  {
    auto in = open_in(cfg.paths.tracks);
    tracks = ingest::read_tracks(in, cfg.paths.tracks);
  }
  {
    auto in = open_in(cfg.paths.events);
    events = ingest::read_events(in, cfg.paths.events);
  }
  {
    auto in = open_in(cfg.paths.weather);
    weather = ingest::read_weather(in, cfg.paths.weather);
  }
  const auto result = ingest::ingest(tracks, events, weather, cfg.ingest);
  {
    auto f = open_out(cfg.paths.features);
    ingest::write_features(f, result.flights);
  }
  const auto rej = rejects_path(cfg.paths.features);
  {
    auto f = open_out(rej);
    f << "flight_id,reason\n";
    for (const auto& r : result.rejects) f << r.flight_id << ',' << r.reason << '\n';
  }
  out << "flights: " << result.flights.size() << "\nrejects: " << result.rejects.size() << '\n';
  print_stage_counts(out, result.flights);
  if (!result.rejects.empty()) {
    err << "warning: " << result.rejects.size() << " flight(s) rejected, see " << rej << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Split {
  std::vector<Flight> train;
  std::vector<Flight> valid;
  std::vector<Flight> test;
};

Split split_70_15_15(const std::vector<Flight>& flights, std::uint64_t seed) {
  std::vector<std::size_t> idx(flights.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed ^ 0x5eed5eedULL);
  rng.shuffle(idx);
  const std::size_t n = idx.size();
  const auto n_train = static_cast<std::size_t>(std::llround(0.70 * static_cast<double>(n)));
  const auto n_valid = static_cast<std::size_t>(std::llround(0.15 * static_cast<double>(n)));
  std::array<std::vector<std::size_t>, 3> parts;
  for (std::size_t k = 0; k < n; ++k) parts[k < n_train ? 0 : (k < n_train + n_valid ? 1 : 2)].push_back(idx[k]);
  Split s;
  std::array<std::vector<Flight>*, 3> dst{&s.train, &s.valid, &s.test};
  for (std::size_t p = 0; p < 3; ++p) {
    std::sort(parts[p].begin(), parts[p].end());
    for (auto i : parts[p]) dst[p]->push_back(flights[i]);
  }
  return s;
}

gbm::SearchSpace search_space(const TrainSettings& t) {
  gbm::SearchSpace s;
  switch (t.space) {
    case SearchPreset::Full: s = gbm::SearchSpace::full(); break;
    case SearchPreset::Reduced: s = gbm::SearchSpace::reduced(); break;
    case SearchPreset::Single: s = gbm::SearchSpace::single(t.single); break;
  }
  s.n_rounds = t.n_rounds;
  s.min_leaf = t.min_leaf;
  return s;
}

std::string predictor_name(bool events, bool weather, bool conditioned) {
  std::string name = conditioned ? "Conditioned Predictor" : "Predictor";
  if (events && weather) return name + " w/ Events and Weather";
  if (events) return name + " w/ Events";
  if (weather) return name + " w/ Weather";
  return name;
}

struct MetricRow {
  std::string predictor;
  std::string subset;
  std::size_t rows = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double rmsle = 0.0;
  double coverage = 0.0;
};

MetricRow evaluate(const StagedPredictor& sp, std::span<const Flight> flights, std::string predictor,
                   std::string subset) {
  MetricRow r{std::move(predictor), std::move(subset), flights.size()};
  if (flights.empty()) return r;
  std::vector<double> y;
  std::vector<double> mu;
  std::size_t inside = 0;
  for (const auto& f : flights) {
    const auto eta = predict_eta(sp, f.features);
    y.push_back(*f.observed_duration);
    mu.push_back(eta.mu);
    const double lo = eta.quantiles.begin()->second;
    const double hi = eta.quantiles.rbegin()->second;
    if (y.back() >= lo && y.back() <= hi) ++inside;
  }
  r.rmse = gbm::rmse(y, mu);
  r.mae = gbm::mae(y, mu);
  try {
    r.rmsle = gbm::rmsle(y, mu);
  } catch (const Error&) {
    r.rmsle = std::nan("");
  }
  r.coverage = static_cast<double>(inside) / static_cast<double>(flights.size());
  return r;
}

std::vector<Flight> of_stage(std::span<const Flight> flights, std::size_t stage) {
  std::vector<Flight> out;
  for (const auto& f : flights) {
    if (static_cast<std::size_t>(ingest::assign_stage(f.features)) == stage) out.push_back(f);
  }
  return out;
}

void write_grid_rows(std::ostream& f, const std::string& target, const gbm::GridSearchResult& g) {
  for (const auto& c : g.evaluated) {
    f << target << ',' << csv::format_double(c.hp.learn_rate) << ',' << c.hp.max_depth << ','
      << csv::format_double(c.hp.sample_rate) << ',' << csv::format_double(c.hp.col_sample_rate) << ','
      << csv::format_double(c.cv_rmsle) << ',' << (c.hp == g.best ? 1 : 0) << '\n';
  }
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate(cfg);
  std::vector<Flight> flights;
  std::size_t unlabeled = 0;
  for (auto& f : load_features(cfg.paths.features)) {
    if (f.observed_duration) {
      flights.push_back(std::move(f));
    } else {
      ++unlabeled;
    }
  }
  if (unlabeled > 0) err << "warning: skipped " << unlabeled << " flight(s) without a label\n";
  if (flights.size() < 20) throw Error(ErrorCode::EmptyData, "training needs at least 20 labeled flights");

  const auto split = split_70_15_15(flights, cfg.seed);
  StagedConfig sc = staged_config(cfg);
  const auto space = search_space(cfg.train);
  const gbm::Loss search_loss = sc.mu_source == MuSource::Median ? gbm::Loss::quantile(0.5) : gbm::Loss::squared();
  const bool searching = space.candidates().size() > 1;

  auto grid_out = open_out(join(cfg.paths.model_dir, kGridFile));
  grid_out << "target,learn_rate,max_depth,sample_rate,col_sample_rate,cv_rmsle,selected\n";

  // Per-stage hyperparameters for the conditioned model.
  const auto counts = stage_counts(split.train);
  std::array<gbm::Hyperparams, 3> stage_hp;
  stage_hp.fill(space.candidates().front());
  for (std::size_t s = 0; s < 3; ++s) {
    if (counts[s] < std::max<std::size_t>(2, sc.min_stage_rows) && !sc.merge_underpopulated) {
      throw StageUnderpopulated(ingest::kStages[s], counts[s]);
    }
    const std::string target = "stage_" + std::string(ingest::to_string(ingest::kStages[s]));
    if (!searching) continue;
    if (counts[s] < 2 * cfg.train.k_folds) {
      err << "note: " << target << " has " << counts[s] << " training rows; using the first grid point\n";
      continue;
    }
    const auto stage_rows = of_stage(split.train, s);
    const auto g = gbm::grid_search(make_dataset(stage_rows, model_columns(sc.use_events, sc.use_weather)), space,
                                    cfg.train.k_folds, search_loss, cfg.seed + 100 + s, cfg.train.threads);
    stage_hp[s] = g.best;
    write_grid_rows(grid_out, target, g);
  }
  const auto conditioned = fit_staged(split.train, stage_hp, sc, cfg.seed);
  for (const auto& note : conditioned.notes) err << "note: " << note << '\n';

  gbm::Hyperparams flat_hp = space.candidates().front();
  if (searching) {
    const auto g = gbm::grid_search(make_dataset(split.train, model_columns(sc.use_events, sc.use_weather)), space,
                                    cfg.train.k_folds, search_loss, cfg.seed + 200, cfg.train.threads);
    flat_hp = g.best;
    write_grid_rows(grid_out, "unconditioned", g);
  }

  // Unconditioned variants keyed by (events, weather).
  std::vector<std::pair<bool, bool>> variants;
  for (int e = 0; e < 2; ++e) {
    for (int w = 0; w < 2; ++w) {
      const bool ev = cfg.train.ablate_events ? e == 1 : sc.use_events;
      const bool we = cfg.train.ablate_weather ? w == 1 : sc.use_weather;
      if (std::find(variants.begin(), variants.end(), std::pair{ev, we}) == variants.end()) variants.push_back({ev, we});
    }
  }
  std::sort(variants.begin(), variants.end(), [](auto a, auto b) {
    return (a.first + a.second) < (b.first + b.second) || ((a.first + a.second) == (b.first + b.second) && a.first > b.first);
  });

  std::vector<MetricRow> rows;
  std::optional<StagedPredictor> flat_deployed;
  for (const auto& [ev, we] : variants) {
    StagedConfig vc = sc;
    vc.use_events = ev;
    vc.use_weather = we;
    auto sp = fit_unconditioned(split.train, flat_hp, vc, cfg.seed + 300);
    const auto name = predictor_name(ev, we, false);
    rows.push_back(evaluate(sp, split.test, name, "test"));
    if (ev == sc.use_events && we == sc.use_weather) flat_deployed = std::move(sp);
  }
  const auto cond_name = predictor_name(sc.use_events, sc.use_weather, true);
  rows.push_back(evaluate(conditioned, split.test, cond_name, "test"));
  rows.push_back(evaluate(conditioned, split.valid, cond_name, "validation"));
  for (std::size_t s = 0; s < 3; ++s) {
    const auto part = of_stage(split.test, s);
    const std::string subset = "test_stage_" + std::string(ingest::to_string(ingest::kStages[s]));
    rows.push_back(evaluate(*flat_deployed, part, predictor_name(sc.use_events, sc.use_weather, false), subset));
    rows.push_back(evaluate(conditioned, part, cond_name, subset));
  }

  {
    auto f = open_out(join(cfg.paths.model_dir, kModelFile));
    f << to_json(conditioned).dump(1) << '\n';
  }
  {
    auto f = open_out(join(cfg.paths.model_dir, kMetricsFile));
    f << "predictor,subset,rows,rmse_s,mae_s,rmsle,coverage\n";
    for (const auto& r : rows) {
      f << r.predictor << ',' << r.subset << ',' << r.rows << ',' << csv::format_double(r.rmse) << ','
        << csv::format_double(r.mae) << ',' << csv::format_double(r.rmsle) << ',' << csv::format_double(r.coverage)
        << '\n';
    }
  }
  {
    auto f = open_out(join(cfg.paths.model_dir, kImportanceFile));
    f << "model,stages,quantile,feature,importance\n";
    for (std::size_t m = 0; m < conditioned.models.size(); ++m) {
      std::string stages;
      for (std::size_t s = 0; s < 3; ++s) {
        if (conditioned.route[s] == m) stages += (stages.empty() ? "" : "+") + std::string(ingest::to_string(ingest::kStages[s]));
      }
      const auto& t = conditioned.models[m];
      const std::array<std::pair<const char*, const gbm::BoostedEnsemble*>, 3> parts{
          {{"lo", &t.lo}, {"mid", &t.mid}, {"hi", &t.hi}}};
      for (const auto& [q, ens] : parts) {
        for (const auto& [name, score] : gbm::feature_importance(*ens)) {
          f << m << ',' << stages << ',' << q << ',' << name << ',' << csv::format_double(score) << '\n';
        }
      }
    }
  }

  out << "train/validation/test rows: " << split.train.size() << '/' << split.valid.size() << '/'
      << split.test.size() << '\n';
  out << "Predictor                                         RMSE      MAE    RMSLE coverage\n";
  for (const auto& r : rows) {
    if (r.subset != "test") continue;
    char line[160];
    std::snprintf(line, sizeof line, "%-44s %8s %8s %8s %8s\n", r.predictor.c_str(), fixed(r.rmse).c_str(),
                  fixed(r.mae).c_str(), fixed(r.rmsle, 4).c_str(), fixed(r.coverage, 3).c_str());
    out << line;
  }
  out << "model written to " << join(cfg.paths.model_dir, kModelFile) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Scheduling

namespace {

StagedPredictor load_model(const RunConfig& cfg) {
  const auto path = join(cfg.paths.model_dir, kModelFile);
  auto in = open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  return staged_from_json(j);
}

json solution_json(const ScheduleSolution& s) {
  json order = json::array();
  for (auto v : s.order) order.push_back(v + 1);
  return {
      {"feasible", s.feasible},
      {"status", to_string(s.status)},
      {"order", order},
      {"landing_times_s", s.landing_times},
      {"makespan_s", s.makespan},
      {"span_s", landing_span(s)},
      {"sum_s", landing_sum(s)},
      {"nodes", s.stats.nodes},
  };
}

json matrix_json(std::size_t n, const std::vector<double>& m) {
  json out = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(i == j ? json(nullptr) : json(m[i * n + j]));
    out.push_back(row);
  }
  return out;
}

struct Horizon {
  std::vector<Flight> flights;
  std::vector<EtaDistribution> etas;
  Seconds origin = 0.0;
  ScheduleModel model;
};

Horizon prepare(std::span<const Flight> flights, const StagedPredictor& sp, const SeparationParams& params,
                const SolverConfig& solver) {
  Horizon h;
  h.flights = select_horizon(flights, solver);
  for (const auto& f : h.flights) h.etas.push_back(predict_eta(sp, f.features));
  h.origin = h.flights.front().entry_time;
  h.model = build_model(build_separation_matrix(h.flights, h.etas, params, h.origin), solver);
  return h;
}

void require_certified(const ScheduleModel& model, const ScheduleSolution& s, const char* which) {
  if (!s.feasible) return;
  const auto report = check_solution(model, s);
  if (!report.ok()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(which) + " schedule failed the constraint check: " + report.violations.front());
  }
}

}  // namespace

int cmd_schedule(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate(cfg);
  const auto sp = load_model(cfg);
  const auto all = load_features(cfg.paths.features);
  if (cfg.schedule.start_index >= all.size()) {
    throw Error(ErrorCode::InvalidArgument, "start_index " + std::to_string(cfg.schedule.start_index) +
                                                " is past the last of " + std::to_string(all.size()) + " flights");
  }
  const std::span<const Flight> window(all.data() + cfg.schedule.start_index, all.size() - cfg.schedule.start_index);
  if (std::min(window.size(), cfg.solver.n_max) < 2) {
    throw Error(ErrorCode::InvalidArgument, "the scheduling window needs at least 2 flights");
  }
  const auto params = separation_params(cfg);
  const auto h = prepare(window, sp, params, cfg.solver);
  const auto report = compare(h.flights, h.model, cfg.solver);
  require_certified(h.model, report.optimized, "optimized");
  require_certified(h.model, report.fcfs, "FCFS");
  const std::size_t n = h.model.n;

  json flights = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = h.flights[i];
    const auto& e = h.etas[i];
    json q = json::object();
    for (const auto& [beta, v] : e.quantiles) q[csv::format_double(beta)] = v;
    flights.push_back({{"index", i + 1},
                       {"id", f.id},
                       {"callsign", f.callsign},
                       {"ac_type", f.ac_type},
                       {"weight_class", to_string(f.weight_class)},
                       {"stage", ingest::to_string(ingest::assign_stage(f.features))},
                       {"entry_s", f.entry_time - h.origin},
                       {"l", h.model.sep.lower[i]},
                       {"u", h.model.sep.upper[i]},
                       {"mu", e.mu},
                       {"sigma", e.sigma},
                       {"quantiles", q}});
  }
  std::size_t checked = 0;
  if (report.optimized.feasible) checked = check_solution(h.model, report.optimized).checked;
  json doc = {
      {"format", "als-schedule"},
      {"version", 1},
      {"origin_epoch_s", h.origin},
      {"pc", params.p_c},
      {"convention", params.convention == QuantileConvention::UpperTail ? "upper_tail" : "literal"},
      {"quantiles", {sp.config.beta_lo, sp.config.beta_hi}},
      {"slack_s", {{"early", params.windows.slack_early}, {"late", params.windows.slack_late}}},
      {"window_k", params.windows.k},
      {"solver", {{"n_max", cfg.solver.n_max}, {"time_limit_s", cfg.solver.time_limit_s}, {"gap", cfg.solver.gap}}},
      {"flights", flights},
      {"reference_s", matrix_json(n, h.model.sep.t_ref)},
      {"sigma_pair_s", matrix_json(n, h.model.sep.sigma_pair)},
      {"separation_s", matrix_json(n, h.model.sep.sep)},
      {"optimized", solution_json(report.optimized)},
      {"fcfs", solution_json(report.fcfs)},
      {"reduction_pct",
       {{"makespan", report.makespan_reduction_pct},
        {"span", report.span_reduction_pct},
        {"sum", report.sum_reduction_pct}}},
      {"shifts", report.shifts},
      {"max_shift", report.max_shift},
      {"diagnosis", report.diagnosis},
      {"constraint_check", {{"checked", checked}, {"violations", 0}}},
  };
  {
    auto f = open_out(join(cfg.paths.output_dir, kScheduleFile));
    f << doc.dump(1) << '\n';
  }

  // Table rows in entry order.
  {
    auto f = open_out(join(cfg.paths.output_dir, kScheduleTableFile));
    f << "entering_sequence,callsign,ac_type,T_ij_s,landing_sequence,landing_time,sigma_ij_s,fcfs_landing_time\n";
    std::vector<std::size_t> land_pos(n, 0);
    std::vector<long> pred(n, -1);
    for (std::size_t k = 0; k < report.optimized.order.size(); ++k) {
      land_pos[report.optimized.order[k]] = k + 1;
      if (k > 0) pred[report.optimized.order[k]] = static_cast<long>(report.optimized.order[k - 1]);
    }
    auto when = [&](const ScheduleSolution& s, std::size_t i) -> std::string {
      if (s.order.empty()) return "";
      const double t = s.landing_times[i];
      return cfg.utc_offset_min ? clock_string(h.origin + t, *cfg.utc_offset_min) : csv::format_double(t);
    };
    for (std::size_t i = 0; i < n; ++i) {
      const auto& fl = h.flights[i];
      f << i + 1 << ',' << fl.callsign << ',' << fl.ac_type << ',';
      if (pred[i] >= 0) f << csv::format_double(h.model.sep.ref_at(static_cast<std::size_t>(pred[i]), i));
      f << ',';
      if (report.optimized.feasible) f << land_pos[i];
      f << ',' << (report.optimized.feasible ? when(report.optimized, i) : "") << ',';
      if (pred[i] >= 0) f << csv::format_double(h.model.sep.sigma_at(static_cast<std::size_t>(pred[i]), i));
      f << ',' << when(report.fcfs, i) << '\n';
    }
  }

  out << "flights in horizon: " << n << '\n';
  out << "FCFS makespan: " << fixed(report.fcfs.makespan) << " s" << (report.fcfs.feasible ? "" : " (infeasible)")
      << '\n';
  if (!report.optimized.feasible) {
    err << "no feasible landing order:\n";
    for (const auto& d : report.diagnosis) err << "  " << d << '\n';
    return kExitInfeasible;
  }
  out << "optimized makespan: " << fixed(report.optimized.makespan) << " s ("
      << to_string(report.optimized.status) << ", " << report.optimized.stats.nodes << " nodes, "
      << fixed(report.optimized.stats.wall_ms, 1) << " ms)\n";
  out << "makespan reduction: " << fixed(report.makespan_reduction_pct, 2) << "%\n";
  out << "max shift: " << report.max_shift << '\n';
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  validate(cfg);
  const auto sp = load_model(cfg);
  const auto all = load_features(cfg.paths.features);
  const auto params = separation_params(cfg);
  auto f = open_out(join(cfg.paths.output_dir, kCompareFile));
  f << "block,first_index,n,fcfs_feasible,optimized_feasible,fcfs_makespan_s,optimized_makespan_s,"
       "makespan_reduction_pct,span_reduction_pct,sum_reduction_pct,max_shift,nodes\n";
  std::size_t blocks = 0;
  std::size_t both = 0;
  std::size_t improved = 0;
  double total_reduction = 0.0;
  for (std::size_t start = cfg.schedule.start_index; start + 2 <= all.size(); start += cfg.solver.n_max) {
    if (cfg.schedule.max_blocks > 0 && blocks == cfg.schedule.max_blocks) break;
    const std::span<const Flight> window(all.data() + start, all.size() - start);
    const auto h = prepare(window, sp, params, cfg.solver);
    const auto r = compare(h.flights, h.model, cfg.solver);
    require_certified(h.model, r.optimized, "optimized");
    require_certified(h.model, r.fcfs, "FCFS");
    f << blocks << ',' << start << ',' << h.model.n << ',' << r.fcfs.feasible << ',' << r.optimized.feasible << ','
      << csv::format_double(r.fcfs.makespan) << ',' << csv::format_double(r.optimized.makespan) << ','
      << csv::format_double(r.makespan_reduction_pct) << ',' << csv::format_double(r.span_reduction_pct) << ','
      << csv::format_double(r.sum_reduction_pct) << ',' << r.max_shift << ',' << r.optimized.stats.nodes << '\n';
    ++blocks;
    if (r.fcfs.feasible && r.optimized.feasible) {
      ++both;
      total_reduction += r.makespan_reduction_pct;
      if (r.optimized.makespan < r.fcfs.makespan - 1e-9) ++improved;
    }
  }
  out << "blocks: " << blocks << "\nboth feasible: " << both << "\nstrictly improved: " << improved << '\n';
  out << "mean makespan reduction: " << fixed(both ? total_reduction / static_cast<double>(both) : 0.0, 2) << "%\n";
  return kExitOk;
}

}  // namespace als
