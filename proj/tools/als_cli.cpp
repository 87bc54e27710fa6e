// Command-line front end: als <ingest|train|schedule|synth|compare> [options]

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "als/commands.hpp"
#include "als/error.hpp"
#include "als/gbm/gbm.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> pc;
  std::optional<std::size_t> nmax;
  std::optional<std::string> quantiles;
  std::optional<std::string> ablation;
  std::optional<double> time_limit;
  std::optional<std::string> tracks, events, weather, features, model_dir, out_dir;
  std::optional<std::size_t> flights;
  std::optional<std::string> congestion;
  bool medium_only = false;
  std::optional<std::string> space;
  bool merge_stages = false;
  std::optional<std::size_t> k_folds;
  std::optional<int> rounds;
  std::optional<unsigned> threads;
  std::optional<std::size_t> start;
  std::optional<std::size_t> max_blocks;
  std::optional<double> slack_early, slack_late, window_k;
  std::optional<int> utc_offset;
  bool literal_pc = false;
  std::optional<std::string> reference;
};

als::RunConfig resolve(const Overrides& o) {
  als::RunConfig c = o.config.empty() ? als::RunConfig{} : als::load_run_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.pc) c.p_c = *o.pc;
  if (o.nmax) c.solver.n_max = *o.nmax;
  if (o.time_limit) c.solver.time_limit_s = *o.time_limit;
  if (o.quantiles) {
    const auto parts = split_list(*o.quantiles);
    if (parts.size() != 2) throw als::Error(als::ErrorCode::InvalidArgument, "--quantiles expects lo,hi");
    c.beta_lo = std::stod(parts[0]);
    c.beta_hi = std::stod(parts[1]);
  }
  if (o.ablation) {
    c.train.ablate_events = false;
    c.train.ablate_weather = false;
    for (const auto& g : split_list(*o.ablation)) {
      if (g == "events") {
        c.train.ablate_events = true;
      } else if (g == "weather") {
        c.train.ablate_weather = true;
      } else if (g != "none") {
        throw als::Error(als::ErrorCode::InvalidArgument, "--ablation accepts events, weather or none");
      }
    }
  }
  if (o.tracks) c.paths.tracks = *o.tracks;
  if (o.events) c.paths.events = *o.events;
  if (o.weather) c.paths.weather = *o.weather;
  if (o.features) c.paths.features = *o.features;
  if (o.model_dir) c.paths.model_dir = *o.model_dir;
  if (o.out_dir) c.paths.output_dir = *o.out_dir;
  if (o.flights) c.synth.flights = *o.flights;
  if (o.congestion) c.synth.congestion = als::synth::parse_congestion(*o.congestion);
  if (o.medium_only) c.synth.medium_only = true;
  if (o.space) c.train.space = als::parse_search_preset(*o.space);
  if (o.merge_stages) c.train.merge_stages = true;
  if (o.k_folds) c.train.k_folds = *o.k_folds;
  if (o.rounds) c.train.n_rounds = *o.rounds;
  if (o.threads) c.train.threads = *o.threads;
  if (o.start) c.schedule.start_index = *o.start;
  if (o.max_blocks) c.schedule.max_blocks = *o.max_blocks;
  if (o.slack_early) c.windows.slack_early = *o.slack_early;
  if (o.slack_late) c.windows.slack_late = *o.slack_late;
  if (o.window_k) c.windows.k = *o.window_k;
  if (o.utc_offset) c.utc_offset_min = *o.utc_offset;
  if (o.literal_pc) c.convention = als::QuantileConvention::Literal;
  if (o.reference) c.reference_matrix = *o.reference;
  als::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aircraft landing scheduling with probabilistic arrival-time prediction"};
  app.require_subcommand(1);
  Overrides o;

  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--seed", o.seed, "RNG seed");
  app.add_option("--pc", o.pc, "Spacing conflict probability in (0,1)");
  app.add_option("--nmax", o.nmax, "Maximum aircraft per solve");
  app.add_option("--quantiles", o.quantiles, "Lower and upper quantile levels, e.g. 0.05,0.95");
  app.add_option("--ablation", o.ablation, "Feature groups to ablate in training: events,weather");
  app.add_option("--time-limit", o.time_limit, "Solver time limit in seconds");
  app.add_option("--tracks", o.tracks, "Track CSV path");
  app.add_option("--events", o.events, "Event CSV path");
  app.add_option("--weather", o.weather, "Weather CSV path");
  app.add_option("--features", o.features, "Feature CSV path");
  app.add_option("--model-dir", o.model_dir, "Model directory");
  app.add_option("--out", o.out_dir, "Output directory");
  app.add_option("--flights", o.flights, "Synthetic flight count");
  app.add_option("--congestion", o.congestion, "Synthetic congestion: low, medium or high");
  app.add_flag("--medium-only", o.medium_only, "Synthetic fleet of Large types only");
  app.add_option("--space", o.space, "Grid: full, reduced or single");
  app.add_flag("--merge-stages", o.merge_stages, "Merge underpopulated stages into a neighbor");
  app.add_option("--k-folds", o.k_folds, "Cross-validation folds");
  app.add_option("--rounds", o.rounds, "Boosting rounds");
  app.add_option("--threads", o.threads, "Grid-search workers (0 = hardware)");
  app.add_option("--start", o.start, "First flight (entry order) of the scheduling window");
  app.add_option("--max-blocks", o.max_blocks, "Limit on compare blocks");
  app.add_option("--slack-early", o.slack_early, "Early window slack, s");
  app.add_option("--slack-late", o.slack_late, "Late window slack, s");
  app.add_option("--window-k", o.window_k, "Sigma multiple added to windows");
  app.add_option("--utc-offset", o.utc_offset, "Local clock offset in minutes for table output");
  app.add_flag("--literal-pc", o.literal_pc, "Use z(P_c) instead of z(1 - P_c)");
  app.add_option("--reference-matrix", o.reference, "JSON file overriding the reference separations");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const als::RunConfig&, std::ostream&, std::ostream&);
  };
  const Command commands[] = {
      {"synth", "Generate a synthetic scenario", als::cmd_synth},
      {"ingest", "Build the feature table from track, event and weather files", als::cmd_ingest},
      {"train", "Train the staged quantile predictor", als::cmd_train},
      {"schedule", "Schedule one horizon and compare with FCFS", als::cmd_schedule},
      {"compare", "Optimized vs FCFS over consecutive horizons", als::cmd_compare},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return als::kExitUsage;
  }

  try {
    const auto cfg = resolve(o);
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) return c.run(cfg, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return als::kExitUsage;
  }
  return als::kExitUsage;
}
