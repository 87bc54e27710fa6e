#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "als/ingest.hpp"
#include "als/scheduler.hpp"
#include "als/separation.hpp"
#include "als/staged.hpp"
#include "als/synth.hpp"

namespace als {

struct RunPaths {
  std::string tracks = "tracks.csv";
  std::string events = "events.csv";
  std::string weather = "weather.csv";
  std::string features = "features.csv";
  std::string model_dir = "model";
  std::string output_dir = "out";
};

struct SynthSettings {
  std::size_t flights = 400;
  synth::Congestion congestion = synth::Congestion::High;
  bool medium_only = false;
};

enum class SearchPreset : std::uint8_t { Full, Reduced, Single };

struct TrainSettings {
  SearchPreset space = SearchPreset::Reduced;
  gbm::Hyperparams single;  // used by SearchPreset::Single
  std::size_t k_folds = 3;
  int n_rounds = 200;
  std::size_t min_leaf = 5;
  bool merge_stages = false;
  MuSource mu = MuSource::Median;
  bool use_events = true;
  bool use_weather = true;
  /// Groups toggled in the ablation table; empty trains the deployed model only.
  bool ablate_events = false;
  bool ablate_weather = false;
  unsigned threads = 0;
};

struct ScheduleSettings {
  /// Position in entry order of the first flight in the horizon.
  std::size_t start_index = 0;
  /// Blocks of n_max flights evaluated by `compare`; 0 means all.
  std::size_t max_blocks = 0;
};

struct RunConfig {
  RunPaths paths;
  ingest::IngestConfig ingest;
  double beta_lo = 0.05;
  double beta_hi = 0.95;
  double p_c = 0.05;
  WindowParams windows;
  QuantileConvention convention = QuantileConvention::UpperTail;
  std::optional<std::string> reference_matrix;
  SolverConfig solver;
  std::uint64_t seed = 1;
  /// Local clock offset for table output; scenario-relative seconds when unset.
  std::optional<int> utc_offset_min;
  SynthSettings synth;
  TrainSettings train;
  ScheduleSettings schedule;
};

/// Throws InvalidArgument or InvalidProbability on inconsistent settings.
void validate(const RunConfig& cfg);

/// Unknown keys are rejected; a config document must carry `seed`.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

SeparationParams separation_params(const RunConfig& cfg);
StagedConfig staged_config(const RunConfig& cfg);

std::string_view to_string(SearchPreset p);
SearchPreset parse_search_preset(std::string_view s);

}  // namespace als
