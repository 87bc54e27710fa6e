#include "als/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "als/csv.hpp"
#include "als/error.hpp"

namespace als::ingest {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr std::array<double, 3> kWindows = {600.0, 1800.0, 3600.0};

bool in_window(Seconds t, Seconds t0, Seconds window, Direction dir) {
  if (dir == Direction::Ahead) return t >= t0 - window && t < t0;
  return t >= t0 && t <= t0 + window;
}

}  // namespace

double haversine_nm(LatLon a, LatLon b) {
  const double phi1 = a.lat_deg * kDegToRad;
  const double phi2 = b.lat_deg * kDegToRad;
  const double dphi = phi2 - phi1;
  const double dlambda = (b.lon_deg - a.lon_deg) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusNm * std::asin(std::sqrt(h));
}

EventType parse_event_type(std::string_view name) {
  if (name == "EV_RRT") return EventType::Rrt;
  if (name == "EV_LOOP") return EventType::Loop;
  if (name == "EV_GOA") return EventType::Goa;
  return EventType::Other;
}

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::Rrt: return "EV_RRT";
    case EventType::Loop: return "EV_LOOP";
    case EventType::Goa: return "EV_GOA";
    case EventType::Other: return "other";
  }
  return "other";
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::I: return "I";
    case Stage::II: return "II";
    case Stage::III: return "III";
  }
  return "I";
}

Stage stage_for_loop_count(double ev_loop_600) {
  if (ev_loop_600 <= 10.0) return Stage::I;
  if (ev_loop_600 <= 40.0) return Stage::II;
  return Stage::III;
}

Stage assign_stage(const FeatureVector& fv) { return stage_for_loop_count(fv[col::EvLoop600]); }

std::size_t count_events(std::span<const FlightEvent> events, Seconds t0, Seconds window, Direction dir,
                         EventType type) {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const FlightEvent& e) {
    return e.type == type && in_window(e.timestamp, t0, window, dir);
  }));
}

std::size_t count_aircraft(std::span<const FleetEntry> entries, std::string_view target_id, Seconds t0,
                           Seconds window, Direction dir) {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const FleetEntry& e) {
    return e.flight_id != target_id && in_window(e.entry_time, t0, window, dir);
  }));
}

namespace {

std::size_t count_sorted(const std::vector<Seconds>& times, Seconds t0, Seconds window, Direction dir) {
  if (dir == Direction::Ahead) {
    const auto lo = std::lower_bound(times.begin(), times.end(), t0 - window);
    const auto hi = std::lower_bound(times.begin(), times.end(), t0);
    return static_cast<std::size_t>(hi - lo);
  }
  const auto lo = std::lower_bound(times.begin(), times.end(), t0);
  const auto hi = std::upper_bound(times.begin(), times.end(), t0 + window);
  return static_cast<std::size_t>(hi - lo);
}

}  // namespace

EventIndex::EventIndex(std::span<const FlightEvent> events) {
  for (const auto& e : events) times_[static_cast<std::size_t>(e.type)].push_back(e.timestamp);
  for (auto& v : times_) std::sort(v.begin(), v.end());
}

std::size_t EventIndex::count(Seconds t0, Seconds window, Direction dir, EventType type) const {
  return count_sorted(times_[static_cast<std::size_t>(type)], t0, window, dir);
}

FleetIndex::FleetIndex(std::span<const FleetEntry> entries) {
  times_.reserve(entries.size());
  for (const auto& e : entries) times_.push_back(e.entry_time);
  std::sort(times_.begin(), times_.end());
}

std::size_t FleetIndex::count(Seconds t0, Seconds window, Direction dir) const {
  const std::size_t n = count_sorted(times_, t0, window, dir);
  if (dir == Direction::Behind && n > 0) return n - 1;
  return n;
}

std::int64_t nearest_hour_bucket(Seconds t) {
  return static_cast<std::int64_t>(std::floor((t + 1800.0) / 3600.0)) * 3600;
}

int hour_feature(Seconds t) {
  const std::int64_t hours = nearest_hour_bucket(t) / 3600;
  return static_cast<int>(((hours % 24) + 24) % 24);
}

void validate(const IngestConfig& cfg) {
  if (!(cfg.outer_radius_nm > cfg.entry_radius_nm && cfg.entry_radius_nm > cfg.final_radius_nm &&
        cfg.final_radius_nm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "TMA radii must be strictly decreasing and positive");
  }
  if (std::abs(cfg.airport.lat_deg) > 90.0 || std::abs(cfg.airport.lon_deg) > 180.0) {
    throw Error(ErrorCode::InvalidArgument, "airport reference point out of range");
  }
}

const TrackPoint& find_boundary_crossing(const TrackedFlight& flight, const IngestConfig& cfg) {
  bool seen_outside = false;
  for (const auto& p : flight.points) {
    const double d = haversine_nm({p.lat_deg, p.lon_deg}, cfg.airport);
    if (d > cfg.entry_radius_nm) {
      seen_outside = true;
    } else if (seen_outside) {
      return p;
    }
  }
  throw Error(ErrorCode::MissingBoundaryCrossing,
              "flight " + flight.id + " never crosses the " + csv::format_double(cfg.entry_radius_nm) + " NM boundary");
}

namespace {

template <typename AircraftCounter, typename EventCounter>
FeatureVector assemble(const TrackedFlight& flight, const TrackPoint& p, AircraftCounter&& aircraft,
                       EventCounter&& events, const WeatherTable& weather, const IngestConfig& cfg) {
  std::array<double, kFeatureCount> v{};
  const Seconds t0 = p.timestamp;
  v[col::AcType] = ac_type_category(flight.ac_type);
  v[col::Latitude] = p.lat_deg;
  v[col::Longitude] = p.lon_deg;
  v[col::Altitude] = p.alt_ft;
  v[col::Distance] = haversine_nm({p.lat_deg, p.lon_deg}, cfg.airport);
  v[col::Time] = t0;
  v[col::Hour] = hour_feature(t0);
  v[col::GroundSpeed] = p.gs_kt;
  for (std::size_t w = 0; w < kWindows.size(); ++w) {
    v[col::AcAhead600 + w] = static_cast<double>(aircraft(t0, kWindows[w], Direction::Ahead));
    v[col::AcBehind600 + w] = static_cast<double>(aircraft(t0, kWindows[w], Direction::Behind));
    v[col::EvRrt600 + w] = static_cast<double>(events(t0, kWindows[w], EventType::Rrt));
    v[col::EvLoop600 + w] = static_cast<double>(events(t0, kWindows[w], EventType::Loop));
    v[col::EvGoa600 + w] = static_cast<double>(events(t0, kWindows[w], EventType::Goa));
  }
  const auto bucket = nearest_hour_bucket(t0);
  const auto it = weather.find(bucket);
  if (it == weather.end()) {
    throw Error(ErrorCode::MissingWeather, "flight " + flight.id + ": no weather record for " + format_iso_utc(bucket));
  }
  const auto& w = it->second;
  v[col::WindSpeed] = w.windspeed;
  v[col::WindDir] = w.winddir;
  v[col::CloudCover] = w.cloudcover;
  v[col::Visibility] = w.visibility;
  v[col::Humidity] = w.humidity;
  return FeatureVector::from_values(v);
}

}  // namespace

FeatureVector build_features(const TrackedFlight& flight, std::span<const FlightEvent> events,
                             const WeatherTable& weather, std::span<const FleetEntry> fleet,
                             const IngestConfig& cfg) {
  const auto& p = find_boundary_crossing(flight, cfg);
  return assemble(
      flight, p,
      [&](Seconds t0, Seconds w, Direction d) { return count_aircraft(fleet, flight.id, t0, w, d); },
      [&](Seconds t0, Seconds w, EventType type) { return count_events(events, t0, w, Direction::Ahead, type); },
      weather, cfg);
}

IngestResult ingest(std::span<const TrackedFlight> flights, std::span<const FlightEvent> events,
                    const WeatherTable& weather, const IngestConfig& cfg) {
  validate(cfg);
  IngestResult result;

  std::vector<const TrackPoint*> crossing(flights.size(), nullptr);
  std::vector<FleetEntry> fleet;
  for (std::size_t i = 0; i < flights.size(); ++i) {
    try {
      crossing[i] = &find_boundary_crossing(flights[i], cfg);
      fleet.push_back({flights[i].id, crossing[i]->timestamp});
    } catch (const Error& e) {
      result.rejects.push_back({flights[i].id, std::string(to_string(e.code())) + ": " + e.what()});
    }
  }

  std::unordered_map<std::string, Seconds> landing;
  for (const auto& e : events) {
    if (e.raw_type != "EV_LND") continue;
    auto [it, inserted] = landing.emplace(e.flight_id, e.timestamp);
    if (!inserted) it->second = std::min(it->second, e.timestamp);
  }

  const EventIndex event_index(events);
  const FleetIndex fleet_index(fleet);

  for (std::size_t i = 0; i < flights.size(); ++i) {
    if (crossing[i] == nullptr) continue;
    const auto& tf = flights[i];
    const auto& p = *crossing[i];
    Flight f;
    f.id = tf.id;
    f.callsign = tf.callsign;
    f.ac_type = tf.ac_type;
    f.weight_class = weight_class_of(tf.ac_type);
    f.entry_time = p.timestamp;
    try {
      f.features = assemble(
          tf, p, [&](Seconds t0, Seconds w, Direction d) { return fleet_index.count(t0, w, d); },
          [&](Seconds t0, Seconds w, EventType type) { return event_index.count(t0, w, Direction::Ahead, type); },
          weather, cfg);
    } catch (const Error& e) {
      result.rejects.push_back({tf.id, std::string(to_string(e.code())) + ": " + e.what()});
      continue;
    }
    if (auto it = landing.find(tf.id); it != landing.end() && it->second > f.entry_time) {
      f.observed_duration = it->second - f.entry_time;
    } else if (!tf.points.empty()) {
      const auto& last = tf.points.back();
      if (last.timestamp > f.entry_time &&
          haversine_nm({last.lat_deg, last.lon_deg}, cfg.airport) <= cfg.final_radius_nm) {
        f.observed_duration = last.timestamp - f.entry_time;
      }
    }
    result.flights.push_back(std::move(f));
  }

  std::sort(result.flights.begin(), result.flights.end(), [](const Flight& a, const Flight& b) {
    if (a.entry_time != b.entry_time) return a.entry_time < b.entry_time;
    return a.id < b.id;
  });
  return result;
}

// ---------------------------------------------------------------------------
// Files

std::int64_t parse_iso_utc(std::string_view s) {
  auto fail = [&]() -> std::int64_t {
    throw Error(ErrorCode::InvalidArgument, "bad ISO timestamp '" + std::string(s) + "'");
  };
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  if (s.size() != 16 && s.size() != 19) return fail();
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (ec != std::errc() || ptr != s.data() + pos + len) fail();
    return v;
  };
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') return fail();
  const int year = num(0, 4);
  const int month = num(5, 2);
  const int day = num(8, 2);
  const int hour = num(11, 2);
  const int minute = num(14, 2);
  int second = 0;
  if (s.size() == 19) {
    if (s[16] != ':') return fail();
    second = num(17, 2);
  }
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) return fail();
  const auto days_since = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days_since) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_iso_utc(std::int64_t epoch) {
  using namespace std::chrono;
  const std::int64_t day_index = epoch >= 0 ? epoch / 86400 : -((-epoch + 86399) / 86400);
  const std::int64_t rem = epoch - day_index * 86400;
  const year_month_day ymd{sys_days{days{day_index}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60));
  return buf;
}

std::vector<TrackedFlight> read_tracks(std::istream& in, std::string_view label) {
  const auto rows = csv::read(in, label, kTracksHeader);
  if (rows.empty()) throw Error(ErrorCode::EmptyData, std::string(label) + ": no track rows");
  std::map<std::string, TrackedFlight> by_id;
  for (const auto& row : rows) {
    TrackPoint p;
    p.flight_id = row.fields[0];
    if (p.flight_id.empty()) throw ParseError(std::string(label), row.line, "empty flight_id");
    p.timestamp = csv::parse_double(row, 3, label);
    p.lat_deg = csv::parse_double(row, 4, label);
    p.lon_deg = csv::parse_double(row, 5, label);
    p.alt_ft = csv::parse_double(row, 6, label);
    p.gs_kt = csv::parse_double(row, 7, label);
    if (!std::isfinite(p.timestamp)) throw ParseError(std::string(label), row.line, "timestamp not finite");
    if (!(std::abs(p.lat_deg) <= 90.0) || !(std::abs(p.lon_deg) <= 180.0)) {
      throw ParseError(std::string(label), row.line, "latitude/longitude out of range");
    }
    auto& tf = by_id[p.flight_id];
    if (tf.id.empty()) {
      tf.id = p.flight_id;
      tf.callsign = row.fields[1];
      tf.ac_type = row.fields[2];
    }
    tf.points.push_back(std::move(p));
  }
  std::vector<TrackedFlight> out;
  out.reserve(by_id.size());
  for (auto& [id, tf] : by_id) {
    std::stable_sort(tf.points.begin(), tf.points.end(),
                     [](const TrackPoint& a, const TrackPoint& b) { return a.timestamp < b.timestamp; });
    out.push_back(std::move(tf));
  }
  return out;
}

std::vector<FlightEvent> read_events(std::istream& in, std::string_view label) {
  const auto rows = csv::read(in, label, kEventsHeader);
  std::vector<FlightEvent> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    FlightEvent e;
    e.flight_id = row.fields[0];
    e.timestamp = csv::parse_double(row, 1, label);
    if (!std::isfinite(e.timestamp)) throw ParseError(std::string(label), row.line, "timestamp not finite");
    e.raw_type = row.fields[2];
    e.type = parse_event_type(e.raw_type);
    out.push_back(std::move(e));
  }
  return out;
}

WeatherTable read_weather(std::istream& in, std::string_view label) {
  const auto rows = csv::read(in, label, kWeatherHeader);
  WeatherTable out;
  for (const auto& row : rows) {
    WeatherRecord w;
    try {
      w.hour_bucket = parse_iso_utc(row.fields[0]);
    } catch (const Error& e) {
      throw ParseError(std::string(label), row.line, e.what());
    }
    if (w.hour_bucket % 3600 != 0) throw ParseError(std::string(label), row.line, "hour_iso is not a full hour");
    w.windspeed = csv::parse_double(row, 1, label);
    w.winddir = csv::parse_double(row, 2, label);
    w.cloudcover = csv::parse_double(row, 3, label);
    w.visibility = csv::parse_double(row, 4, label);
    w.humidity = csv::parse_double(row, 5, label);
    if (!std::isnan(w.winddir) && !(w.winddir >= 0.0 && w.winddir < 360.0)) {
      throw ParseError(std::string(label), row.line, "winddir outside [0,360)");
    }
    if (!out.emplace(w.hour_bucket, w).second) {
      throw ParseError(std::string(label), row.line, "duplicate hour bucket " + row.fields[0]);
    }
  }
  return out;
}

void write_tracks(std::ostream& out, std::span<const TrackedFlight> flights) {
  out << kTracksHeader << '\n';
  for (const auto& f : flights) {
    for (const auto& p : f.points) {
      out << f.id << ',' << f.callsign << ',' << f.ac_type << ',' << csv::format_double(p.timestamp) << ','
          << csv::format_double(p.lat_deg) << ',' << csv::format_double(p.lon_deg) << ','
          << csv::format_double(p.alt_ft) << ',' << csv::format_double(p.gs_kt) << '\n';
    }
  }
}

void write_events(std::ostream& out, std::span<const FlightEvent> events) {
  out << kEventsHeader << '\n';
  for (const auto& e : events) {
    out << e.flight_id << ',' << csv::format_double(e.timestamp) << ','
        << (e.raw_type.empty() ? std::string(to_string(e.type)) : e.raw_type) << '\n';
  }
}

void write_weather(std::ostream& out, const WeatherTable& weather) {
  out << kWeatherHeader << '\n';
  for (const auto& [bucket, w] : weather) {
    out << format_iso_utc(bucket) << ',' << csv::format_double(w.windspeed) << ',' << csv::format_double(w.winddir)
        << ',' << csv::format_double(w.cloudcover) << ',' << csv::format_double(w.visibility) << ','
        << csv::format_double(w.humidity) << '\n';
  }
}

std::string features_header() {
  std::string h = "flight_id,callsign";
  for (const auto& spec : feature_schema()) {
    h += ',';
    h += spec.name;
  }
  h += ",stage,label_duration_s";
  return h;
}

void write_features(std::ostream& out, std::span<const Flight> flights) {
  out << features_header() << '\n';
  for (const auto& f : flights) {
    out << f.id << ',' << f.callsign;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      out << ',';
      if (i == col::AcType) {
        out << f.ac_type;
      } else {
        out << csv::format_double(f.features[i]);
      }
    }
    out << ',' << to_string(assign_stage(f.features)) << ','
        << (f.observed_duration ? csv::format_double(*f.observed_duration) : std::string()) << '\n';
  }
}

std::vector<Flight> read_features(std::istream& in, std::string_view label) {
  const std::string header = features_header();
  const auto rows = csv::read(in, label, header);
  std::vector<Flight> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    Flight f;
    f.id = row.fields[0];
    f.callsign = row.fields[1];
    std::array<double, kFeatureCount> v{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (i == col::AcType) {
        f.ac_type = row.fields[2 + i];
        v[i] = ac_type_category(f.ac_type);
      } else {
        v[i] = csv::parse_double(row, 2 + i, label);
      }
    }
    try {
      f.features = FeatureVector::from_values(v);
    } catch (const Error& e) {
      throw ParseError(std::string(label), row.line, e.what());
    }
    f.weight_class = weight_class_of(f.ac_type);
    f.entry_time = f.features[col::Time];
    const auto& stage = row.fields[2 + kFeatureCount];
    if (stage != to_string(assign_stage(f.features))) {
      throw ParseError(std::string(label), row.line, "stage column disagrees with EV_LOOP_600");
    }
    const double label_value = csv::parse_double(row, 3 + kFeatureCount, label);
    if (!std::isnan(label_value)) f.observed_duration = label_value;
    try {
      validate(f);
    } catch (const Error& e) {
      throw ParseError(std::string(label), row.line, e.what());
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace als::ingest
