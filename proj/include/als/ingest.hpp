#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "als/domain.hpp"

namespace als::ingest {

inline constexpr double kEarthRadiusNm = 3440.065;

struct LatLon {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

/// Great-circle distance in nautical miles.
double haversine_nm(LatLon a, LatLon b);

struct TrackPoint {
  std::string flight_id;
  Seconds timestamp = 0.0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_ft = 0.0;
  double gs_kt = 0.0;
};

enum class EventType : std::uint8_t { Rrt, Loop, Goa, Other };

EventType parse_event_type(std::string_view name);
std::string_view to_string(EventType t);

struct FlightEvent {
  std::string flight_id;
  Seconds timestamp = 0.0;
  EventType type = EventType::Other;
  std::string raw_type;  // as written in the file, e.g. "EV_LND"
};

struct WeatherRecord {
  std::int64_t hour_bucket = 0;  // epoch seconds at the full hour
  double windspeed = 0.0;
  double winddir = 0.0;
  double cloudcover = 0.0;
  double visibility = 0.0;
  double humidity = 0.0;
};

using WeatherTable = std::map<std::int64_t, WeatherRecord>;

enum class Stage : std::uint8_t { I = 0, II = 1, III = 2 };
inline constexpr std::array<Stage, 3> kStages = {Stage::I, Stage::II, Stage::III};

std::string_view to_string(Stage s);
Stage stage_for_loop_count(double ev_loop_600);
Stage assign_stage(const FeatureVector& fv);

enum class Direction : std::uint8_t { Ahead, Behind };

/// Ahead counts timestamps in [t0 - window, t0); behind counts [t0, t0 + window].
std::size_t count_events(std::span<const FlightEvent> events, Seconds t0, Seconds window, Direction dir,
                         EventType type);

struct FleetEntry {
  std::string flight_id;
  Seconds entry_time = 0.0;
};

/// Same window semantics as count_events over other flights' boundary
/// crossings; the target flight itself is never counted.
std::size_t count_aircraft(std::span<const FleetEntry> entries, std::string_view target_id, Seconds t0,
                           Seconds window, Direction dir);

/// Sorted timestamps per event type for repeated window queries.
class EventIndex {
public:
  explicit EventIndex(std::span<const FlightEvent> events);
  std::size_t count(Seconds t0, Seconds window, Direction dir, EventType type) const;

private:
  std::array<std::vector<Seconds>, 4> times_;
};

/// Sorted entry times for repeated aircraft-count queries.
class FleetIndex {
public:
  explicit FleetIndex(std::span<const FleetEntry> entries);
  /// Excludes one crossing at exactly `t0` (the target's own entry).
  std::size_t count(Seconds t0, Seconds window, Direction dir) const;

private:
  std::vector<Seconds> times_;
};

/// Nearest full hour in epoch seconds; exact half hours round up.
std::int64_t nearest_hour_bucket(Seconds t);
/// Hour-of-day feature value for a timestamp.
int hour_feature(Seconds t);

struct IngestConfig {
  LatLon airport{33.6367, -84.4281};
  double outer_radius_nm = 200.0;
  double entry_radius_nm = 100.0;
  double final_radius_nm = 40.0;
};

void validate(const IngestConfig& cfg);

/// One flight's radar hits.
struct TrackedFlight {
  std::string id;
  std::string callsign;
  std::string ac_type;
  std::vector<TrackPoint> points;  // ascending timestamp
};

/// First radar hit at or inside the entry radius that follows a hit outside
/// it. Throws MissingBoundaryCrossing when no such hit exists.
const TrackPoint& find_boundary_crossing(const TrackedFlight& flight, const IngestConfig& cfg);

/// Feature row for one flight at its TMA boundary crossing.
FeatureVector build_features(const TrackedFlight& flight, std::span<const FlightEvent> events,
                             const WeatherTable& weather, std::span<const FleetEntry> fleet,
                             const IngestConfig& cfg);

struct Reject {
  std::string flight_id;
  std::string reason;
};

struct IngestResult {
  std::vector<Flight> flights;  // ordered by (entry_time, id)
  std::vector<Reject> rejects;
};

/// Whole-file pipeline: group tracks into flights, find crossings, build
/// features and labels. Flights that cannot be featurized become rejects.
IngestResult ingest(std::span<const TrackedFlight> flights, std::span<const FlightEvent> events,
                    const WeatherTable& weather, const IngestConfig& cfg);

// File formats.
inline constexpr std::string_view kTracksHeader = "flight_id,callsign,ac_type,timestamp,lat,lon,alt_ft,gs_kt";
inline constexpr std::string_view kEventsHeader = "flight_id,timestamp,event_type";
inline constexpr std::string_view kWeatherHeader = "hour_iso,windspeed,winddir,cloudcover,visibility,humidity";

std::vector<TrackedFlight> read_tracks(std::istream& in, std::string_view label);
std::vector<FlightEvent> read_events(std::istream& in, std::string_view label);
WeatherTable read_weather(std::istream& in, std::string_view label);

void write_tracks(std::ostream& out, std::span<const TrackedFlight> flights);
void write_events(std::ostream& out, std::span<const FlightEvent> events);
void write_weather(std::ostream& out, const WeatherTable& weather);

/// "YYYY-MM-DDTHH:MM:SSZ" (trailing Z and seconds optional) to epoch seconds.
std::int64_t parse_iso_utc(std::string_view s);
std::string format_iso_utc(std::int64_t epoch);

std::string features_header();
void write_features(std::ostream& out, std::span<const Flight> flights);
std::vector<Flight> read_features(std::istream& in, std::string_view label);

}  // namespace als::ingest
