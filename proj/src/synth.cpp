#include "als/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "als/error.hpp"
#include "als/rng.hpp"

namespace als::synth {

using ingest::FlightEvent;
using ingest::Stage;
using ingest::TrackedFlight;
using ingest::TrackPoint;

std::string_view to_string(Congestion c) {
  switch (c) {
    case Congestion::Low: return "low";
    case Congestion::Medium: return "medium";
    case Congestion::High: return "high";
  }
  return "low";
}

Congestion parse_congestion(std::string_view s) {
  if (s == "low") return Congestion::Low;
  if (s == "medium") return Congestion::Medium;
  if (s == "high") return Congestion::High;
  throw Error(ErrorCode::InvalidArgument, "congestion must be low, medium or high");
}

double noise_sd(Stage stage) {
  switch (stage) {
    case Stage::I: return 25.0;
    case Stage::II: return 45.0;
    case Stage::III: return 90.0;
  }
  return 25.0;
}

double duration_mean(const FeatureVector& fv) {
  const double gs = std::max(fv[col::GroundSpeed], 150.0);
  const double dist = fv[col::Distance];
  const double loops = fv[col::EvLoop600];
  const double ahead = fv[col::AcAhead1800];
  const double rrt = fv[col::EvRrt1800];
  const double goa = fv[col::EvGoa1800];
  const double wind = fv[col::WindSpeed];
  const double vis = fv[col::Visibility];
  const bool heavy = weight_class_of(ac_type_name(static_cast<int>(fv[col::AcType]))) == WeightClass::Heavy;

  const double base = 3600.0 * dist / (0.8 * gs);
  switch (ingest::assign_stage(fv)) {
    case Stage::I:
      return base + 4.0 * loops + 6.0 * ahead + 3.0 * rrt;
    case Stage::II:
      return base + 40.0 + 9.0 * (loops - 10.0) + 10.0 * ahead + 8.0 * rrt + 2.0 * wind +
             (vis < 3.0 ? 60.0 : 0.0) + (heavy ? 40.0 : 0.0);
    case Stage::III: {
      // Holding dominates; speed at the boundary matters much less.
      const double flat = 3600.0 * dist / (0.8 * 280.0);
      return 0.5 * base + 0.5 * flat + 310.0 + 25.0 * (loops - 40.0) + 18.0 * ahead + 15.0 * rrt + 40.0 * goa +
             6.0 * wind + 20.0 * std::max(0.0, 5.0 - vis);
    }
  }
  return base;
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

ingest::LatLon destination(ingest::LatLon from, double bearing_deg, double dist_nm) {
  const double delta = dist_nm / ingest::kEarthRadiusNm;
  const double theta = bearing_deg * kDegToRad;
  const double phi1 = from.lat_deg * kDegToRad;
  const double lambda1 = from.lon_deg * kDegToRad;
  const double phi2 = std::asin(std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta));
  const double lambda2 = lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                              std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  return {phi2 / kDegToRad, std::remainder(lambda2 / kDegToRad, 360.0)};
}

struct TypeWeight {
  std::string_view icao;
  double weight;
};

constexpr std::array kMixedFleet = {
    TypeWeight{"MD88", 0.16}, TypeWeight{"B712", 0.12}, TypeWeight{"B738", 0.12}, TypeWeight{"B739", 0.10},
    TypeWeight{"A321", 0.10}, TypeWeight{"CRJ9", 0.08}, TypeWeight{"CRJ2", 0.05}, TypeWeight{"MD90", 0.05},
    TypeWeight{"E175", 0.02}, TypeWeight{"B752", 0.07}, TypeWeight{"B763", 0.04}, TypeWeight{"A333", 0.02},
    TypeWeight{"B772", 0.02}, TypeWeight{"B190", 0.03}, TypeWeight{"C208", 0.02},
};

constexpr std::array kMediumFleet = {
    TypeWeight{"MD88", 0.25}, TypeWeight{"B712", 0.15}, TypeWeight{"B738", 0.15}, TypeWeight{"B739", 0.15},
    TypeWeight{"A321", 0.15}, TypeWeight{"CRJ9", 0.10}, TypeWeight{"MD90", 0.05},
};

constexpr std::array<std::string_view, 6> kAirlines = {"DAL", "SKW", "EDV", "SWA", "AAL", "UAL"};

template <std::size_t N>
std::string_view pick_type(Rng& rng, const std::array<TypeWeight, N>& fleet) {
  double total = 0.0;
  for (const auto& t : fleet) total += t.weight;
  double u = rng.uniform() * total;
  for (const auto& t : fleet) {
    if (u < t.weight) return t.icao;
    u -= t.weight;
  }
  return fleet.back().icao;
}

double loop_rate_per_minute(Rng& rng, Congestion c) {
  const double u = rng.uniform();
  switch (c) {
    case Congestion::Low:
      return 0.15;
    case Congestion::Medium:
      return u < 0.5 ? 0.3 : (u < 0.9 ? 2.0 : 5.0);
    case Congestion::High:
      return u < 0.3 ? 0.3 : (u < 0.65 ? 2.5 : 6.0);
  }
  return 0.15;
}

double mean_gap_s(Congestion c) {
  switch (c) {
    case Congestion::Low: return 300.0;
    case Congestion::Medium: return 150.0;
    case Congestion::High: return 90.0;
  }
  return 300.0;
}

std::string flight_id(std::size_t i) {
  std::string digits = std::to_string(i + 1);
  return "F" + std::string(digits.size() < 5 ? 5 - digits.size() : 0, '0') + digits;
}

}  // namespace

Scenario generate_scenario(std::uint64_t seed, std::size_t n_flights, Congestion congestion,
                           const SynthOptions& options) {
  if (n_flights == 0) throw Error(ErrorCode::InvalidArgument, "n_flights must be >= 1");
  ingest::validate(options.geometry);
  const auto& geo = options.geometry;
  Rng rng(seed);
  Scenario sc;

  // Entries and pre-boundary tracks.
  std::vector<double> entries(n_flights);
  double t = static_cast<double>(options.start_epoch);
  for (std::size_t i = 0; i < n_flights; ++i) {
    if (i > 0) t += std::max(30.0, std::round(rng.exponential(1.0 / mean_gap_s(congestion))));
    entries[i] = t;
  }

  struct Kinematics {
    double bearing;
    double gs;
    double alt;
  };
  std::vector<Kinematics> kin(n_flights);
  sc.tracks.resize(n_flights);
  for (std::size_t i = 0; i < n_flights; ++i) {
    auto& tf = sc.tracks[i];
    tf.id = flight_id(i);
    tf.ac_type = std::string(options.medium_only ? pick_type(rng, kMediumFleet) : pick_type(rng, kMixedFleet));
    tf.callsign = std::string(kAirlines[rng.below(kAirlines.size())]) + std::to_string(100 + rng.below(8900));
    auto& k = kin[i];
    k.bearing = rng.uniform(0.0, 360.0);
    k.gs = std::round(rng.uniform(230.0, 330.0));
    k.alt = std::round(rng.normal(11000.0, 1500.0) / 100.0) * 100.0;
    const double cruise_gs = 1.3 * k.gs;
    for (int step = 10; step >= 0; --step) {
      const double dt = 60.0 * step;
      const double dist = step == 0 ? geo.entry_radius_nm - 0.1 : geo.entry_radius_nm + 0.4 + cruise_gs * dt / 3600.0;
      const auto pos = destination(geo.airport, k.bearing, dist);
      tf.points.push_back(TrackPoint{tf.id, entries[i] - dt, pos.lat_deg, pos.lon_deg,
                                     step == 0 ? k.alt : k.alt + 300.0 * step,
                                     step == 0 ? k.gs : std::round(cruise_gs)});
    }
  }

  // Safety events and background traffic events.
  const double t_begin = entries.front() - 3600.0;
  const double t_end = entries.back() + 3600.0;
  const auto minutes = static_cast<std::size_t>(std::ceil((t_end - t_begin) / 60.0));
  double loop_rate = loop_rate_per_minute(rng, congestion);
  auto random_flight = [&]() { return sc.tracks[rng.below(n_flights)].id; };
  for (std::size_t m = 0; m < minutes; ++m) {
    if (m % 20 == 0) loop_rate = loop_rate_per_minute(rng, congestion);
    const double minute_start = t_begin + 60.0 * static_cast<double>(m);
    auto emit = [&](ingest::EventType type, std::string_view raw, double rate) {
      const auto count = rng.poisson(rate);
      for (std::uint64_t c = 0; c < count; ++c) {
        sc.events.push_back(
            FlightEvent{random_flight(), minute_start + static_cast<double>(rng.below(60)), type, std::string(raw)});
      }
    };
    emit(ingest::EventType::Loop, "EV_LOOP", loop_rate);
    emit(ingest::EventType::Rrt, "EV_RRT", 0.1 + 0.1 * loop_rate);
    emit(ingest::EventType::Goa, "EV_GOA", 0.01 + 0.02 * loop_rate);
    emit(ingest::EventType::Other, "EV_TOD", 0.4);
  }

  // Hourly weather as a bounded random walk.
  {
    const auto first = static_cast<std::int64_t>(std::floor(t_begin / 3600.0)) * 3600;
    const auto last = static_cast<std::int64_t>(std::ceil((t_end + 7200.0) / 3600.0)) * 3600;
    double ws = rng.uniform(3.0, 15.0);
    double wd = rng.uniform(0.0, 360.0);
    double cc = rng.uniform(1000.0, 8000.0);
    double vis = rng.uniform(4.0, 10.0);
    double hum = rng.uniform(40.0, 90.0);
    for (auto h = first; h <= last; h += 3600) {
      ws = std::clamp(ws + rng.normal(0.0, 2.0), 0.0, 40.0);
      wd = std::fmod(wd + rng.normal(0.0, 15.0) + 360.0, 360.0);
      cc = std::clamp(cc + rng.normal(0.0, 800.0), 200.0, 12000.0);
      vis = std::clamp(vis + rng.normal(0.0, 1.2), 0.5, 10.0);
      hum = std::clamp(hum + rng.normal(0.0, 5.0), 15.0, 100.0);
      auto r2 = [](double v, double q) { return std::round(v * q) / q; };
      sc.weather.emplace(h, ingest::WeatherRecord{h, r2(ws, 10), std::fmod(r2(wd, 1), 360.0), r2(cc, 0.01), r2(vis, 10), r2(hum, 1)});
    }
  }

  // Features from the emitted files, then labels.
  auto built = ingest::ingest(sc.tracks, sc.events, sc.weather, geo);
  if (!built.rejects.empty()) {
    throw Error(ErrorCode::InvalidArgument, "generator produced an unfeaturizable flight: " + built.rejects.front().reason);
  }
  sc.flights = std::move(built.flights);
  for (auto& f : sc.flights) {
    const auto idx = static_cast<std::size_t>(std::stoul(f.id.substr(1))) - 1;
    auto& tf = sc.tracks[idx];
    const auto& k = kin[idx];
    const Stage stage = ingest::assign_stage(f.features);
    const double dur = std::max(300.0, std::round(duration_mean(f.features) + rng.normal(0.0, noise_sd(stage))));
    f.observed_duration = dur;
    const double landing = f.entry_time + dur;
    for (double s = 120.0; s < dur; s += 120.0) {
      const double frac = s / dur;
      const auto pos = destination(geo.airport, k.bearing, (geo.entry_radius_nm - 0.1) * (1.0 - frac));
      tf.points.push_back(TrackPoint{tf.id, f.entry_time + s, pos.lat_deg, pos.lon_deg,
                                     std::round(k.alt + (1000.0 - k.alt) * frac),
                                     std::round(k.gs + (140.0 - k.gs) * frac)});
    }
    const auto touchdown = destination(geo.airport, k.bearing, 0.3);
    tf.points.push_back(TrackPoint{tf.id, landing, touchdown.lat_deg, touchdown.lon_deg, 1000.0, 140.0});
    sc.events.push_back(FlightEvent{tf.id, landing, ingest::EventType::Other, "EV_LND"});
  }
  std::stable_sort(sc.events.begin(), sc.events.end(),
                   [](const FlightEvent& a, const FlightEvent& b) { return a.timestamp < b.timestamp; });
  return sc;
}

}  // namespace als::synth
