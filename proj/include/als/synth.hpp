#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "als/domain.hpp"
#include "als/ingest.hpp"

namespace als::synth {

enum class Congestion : std::uint8_t { Low, Medium, High };

std::string_view to_string(Congestion c);
Congestion parse_congestion(std::string_view s);

struct SynthOptions {
  ingest::IngestConfig geometry;
  std::int64_t start_epoch = 1564660800;  // 2019-08-01T12:00:00Z
  bool medium_only = false;               // restrict the fleet to Large types
};

/// Synthetic stand-in for a day of terminal-area recordings.
///
/// Entries arrive as a Poisson stream (mean gap 300/150/90 s for
/// low/medium/high). Loop events follow a piecewise-constant intensity over
/// 20-minute segments; low congestion keeps every segment quiet, medium and
/// high mix in holding episodes dense enough to reach stages II and III.
/// Reroute and go-around intensities scale with the loop intensity.
///
/// Each label is drawn after the flight's features have been built from the
/// emitted files, as `duration_mean(features) + N(0, noise_sd(stage))`
/// clamped to at least 300 s, so the learner sees a real feature-to-label
/// relation with stage-dependent slope and spread.
struct Scenario {
  std::vector<ingest::TrackedFlight> tracks;
  std::vector<ingest::FlightEvent> events;
  ingest::WeatherTable weather;
  std::vector<Flight> flights;  // features and ground-truth durations, entry order
};

Scenario generate_scenario(std::uint64_t seed, std::size_t n_flights, Congestion congestion,
                           const SynthOptions& options = {});

/// Deterministic part of the generative duration model.
double duration_mean(const FeatureVector& fv);
double noise_sd(ingest::Stage stage);

}  // namespace als::synth
