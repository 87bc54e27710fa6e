#include "als/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "als/error.hpp"

namespace als {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::NonFiniteLabel: return "NonFiniteLabel";
    case ErrorCode::InvalidQuantile: return "InvalidQuantile";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::StageUnderpopulated: return "StageUnderpopulated";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RmsleDomain: return "RmsleDomain";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::MissingWeather: return "MissingWeather";
    case ErrorCode::MissingBoundaryCrossing: return "MissingBoundaryCrossing";
    case ErrorCode::TooManyAircraft: return "TooManyAircraft";
    case ErrorCode::EmptyInstance: return "EmptyInstance";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
  }
  return "Unknown";
}

std::string_view to_string(WeightClass wc) {
  switch (wc) {
    case WeightClass::Heavy: return "Heavy";
    case WeightClass::B757: return "B757";
    case WeightClass::Large: return "Large";
    case WeightClass::Small: return "Small";
  }
  return "Large";
}

std::optional<WeightClass> parse_weight_class(std::string_view s) {
  for (auto wc : kWeightClasses) {
    if (to_string(wc) == s) return wc;
  }
  return std::nullopt;
}

namespace {

struct TypeEntry {
  std::string_view icao;
  WeightClass wc;
};

// ICAO designators grouped by wake category. The category index used as the
// acType feature is the position in this table.
constexpr std::array kTypeTable = {
    // Heavy
    TypeEntry{"A306", WeightClass::Heavy}, TypeEntry{"A332", WeightClass::Heavy},
    TypeEntry{"A333", WeightClass::Heavy}, TypeEntry{"A339", WeightClass::Heavy},
    TypeEntry{"A343", WeightClass::Heavy}, TypeEntry{"A346", WeightClass::Heavy},
    TypeEntry{"A359", WeightClass::Heavy}, TypeEntry{"A35K", WeightClass::Heavy},
    TypeEntry{"A388", WeightClass::Heavy}, TypeEntry{"B744", WeightClass::Heavy},
    TypeEntry{"B748", WeightClass::Heavy}, TypeEntry{"B762", WeightClass::Heavy},
    TypeEntry{"B763", WeightClass::Heavy}, TypeEntry{"B764", WeightClass::Heavy},
    TypeEntry{"B772", WeightClass::Heavy}, TypeEntry{"B77L", WeightClass::Heavy},
    TypeEntry{"B77W", WeightClass::Heavy}, TypeEntry{"B788", WeightClass::Heavy},
    TypeEntry{"B789", WeightClass::Heavy}, TypeEntry{"B78X", WeightClass::Heavy},
    TypeEntry{"MD11", WeightClass::Heavy},
    // B757
    TypeEntry{"B752", WeightClass::B757}, TypeEntry{"B753", WeightClass::B757},
    // Large
    TypeEntry{"A319", WeightClass::Large}, TypeEntry{"A320", WeightClass::Large},
    TypeEntry{"A321", WeightClass::Large}, TypeEntry{"B712", WeightClass::Large},
    TypeEntry{"B737", WeightClass::Large}, TypeEntry{"B738", WeightClass::Large},
    TypeEntry{"B739", WeightClass::Large}, TypeEntry{"B38M", WeightClass::Large},
    TypeEntry{"CRJ2", WeightClass::Large}, TypeEntry{"CRJ7", WeightClass::Large},
    TypeEntry{"CRJ9", WeightClass::Large}, TypeEntry{"E145", WeightClass::Large},
    TypeEntry{"E170", WeightClass::Large}, TypeEntry{"E175", WeightClass::Large},
    TypeEntry{"E190", WeightClass::Large}, TypeEntry{"MD88", WeightClass::Large},
    TypeEntry{"MD90", WeightClass::Large}, TypeEntry{"DH8D", WeightClass::Large},
    // Flown as medium in the Atlanta arrival stream.
    TypeEntry{"B190", WeightClass::Large},
    // Small
    TypeEntry{"BE20", WeightClass::Small},
    TypeEntry{"C172", WeightClass::Small}, TypeEntry{"C208", WeightClass::Small},
    TypeEntry{"PC12", WeightClass::Small}, TypeEntry{"SR22", WeightClass::Small},
};

constexpr std::string_view kOtherName = "OTHER";

using G = FeatureGroup;
using K = FeatureKind;

constexpr std::array<FeatureSpec, kFeatureCount> kSchema = {{
    {"acType", K::Categorical, G::FlightConditions},
    {"Latitude", K::Numeric, G::FlightConditions},
    {"Longitude", K::Numeric, G::FlightConditions},
    {"Altitude", K::Numeric, G::FlightConditions},
    {"Distance", K::Numeric, G::FlightConditions},
    {"Time", K::Numeric, G::FlightConditions},
    {"Hour", K::Numeric, G::FlightConditions},
    {"GroundSpeed", K::Numeric, G::FlightConditions},
    {"AC_600s_ahead", K::Numeric, G::AircraftCounts},
    {"AC_1800s_ahead", K::Numeric, G::AircraftCounts},
    {"AC_3600s_ahead", K::Numeric, G::AircraftCounts},
    {"AC_600s_behind", K::Numeric, G::AircraftCounts},
    {"AC_1800s_behind", K::Numeric, G::AircraftCounts},
    {"AC_3600s_behind", K::Numeric, G::AircraftCounts},
    {"EV_RRT_600", K::Numeric, G::Events},
    {"EV_RRT_1800", K::Numeric, G::Events},
    {"EV_RRT_3600", K::Numeric, G::Events},
    {"EV_LOOP_600", K::Numeric, G::Events},
    {"EV_LOOP_1800", K::Numeric, G::Events},
    {"EV_LOOP_3600", K::Numeric, G::Events},
    {"EV_GOA_600", K::Numeric, G::Events},
    {"EV_GOA_1800", K::Numeric, G::Events},
    {"EV_GOA_3600", K::Numeric, G::Events},
    {"windspeed", K::Numeric, G::Weather},
    {"winddir", K::Numeric, G::Weather},
    {"cloudcover", K::Numeric, G::Weather},
    {"visibility", K::Numeric, G::Weather},
    {"humidity", K::Numeric, G::Weather},
}};

bool same_value(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return a == b;
}

}  // namespace

const int kOtherAcType = static_cast<int>(kTypeTable.size());

WeightClass weight_class_of(std::string_view ac_type) {
  for (const auto& e : kTypeTable) {
    if (e.icao == ac_type) return e.wc;
  }
  return WeightClass::Large;
}

int ac_type_category(std::string_view ac_type) {
  for (std::size_t i = 0; i < kTypeTable.size(); ++i) {
    if (kTypeTable[i].icao == ac_type) return static_cast<int>(i);
  }
  return kOtherAcType;
}

std::string_view ac_type_name(int category) {
  if (category >= 0 && category < kOtherAcType) return kTypeTable[static_cast<std::size_t>(category)].icao;
  return kOtherName;
}

std::size_t ac_type_category_count() { return kTypeTable.size() + 1; }

const std::array<FeatureSpec, kFeatureCount>& feature_schema() { return kSchema; }

std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kSchema.size(); ++i) {
    if (kSchema[i].name == name) return i;
  }
  return std::nullopt;
}

FeatureVector::FeatureVector(const std::array<double, kFeatureCount>& v) : values_(v) {}

void FeatureVector::validate(const std::array<double, kFeatureCount>& v) {
  const double cat = v[col::AcType];
  if (!(cat >= 0.0 && cat <= kOtherAcType && cat == std::floor(cat))) {
    throw Error(ErrorCode::SchemaMismatch, "acType must be a category index");
  }
  const double hour = v[col::Hour];
  if (!(hour >= 0.0 && hour <= 23.0 && hour == std::floor(hour))) {
    throw Error(ErrorCode::SchemaMismatch, "Hour must be an integer in [0,23]");
  }
  for (std::size_t i = col::AcAhead600; i <= col::EvGoa3600; ++i) {
    if (!(v[i] >= 0.0)) {
      throw Error(ErrorCode::SchemaMismatch,
                  std::string(kSchema[i].name) + " must be a non-negative count");
    }
  }
}

FeatureVector FeatureVector::from_values(std::span<const double> values) {
  if (values.size() != kFeatureCount) {
    throw Error(ErrorCode::SchemaMismatch, "feature row has " + std::to_string(values.size()) +
                                               " values, schema has " + std::to_string(kFeatureCount));
  }
  std::array<double, kFeatureCount> v{};
  std::copy(values.begin(), values.end(), v.begin());
  validate(v);
  return FeatureVector(v);
}

FeatureVector FeatureVector::from_named(const std::vector<std::pair<std::string, double>>& named) {
  std::array<double, kFeatureCount> v{};
  std::array<bool, kFeatureCount> seen{};
  for (const auto& [name, value] : named) {
    auto idx = feature_index(name);
    if (!idx) throw Error(ErrorCode::SchemaMismatch, "unknown feature column '" + name + "'");
    if (seen[*idx]) throw Error(ErrorCode::SchemaMismatch, "duplicate feature column '" + name + "'");
    seen[*idx] = true;
    v[*idx] = value;
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::SchemaMismatch, "missing feature column '" + std::string(kSchema[i].name) + "'");
    }
  }
  validate(v);
  return FeatureVector(v);
}

bool operator==(const FeatureVector& a, const FeatureVector& b) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!same_value(a.values_[i], b.values_[i])) return false;
  }
  return true;
}

void validate(const Flight& f) {
  if (!std::isfinite(f.entry_time)) throw Error(ErrorCode::InvalidArgument, "flight " + f.id + ": entry_time not finite");
  if (f.observed_duration && !(*f.observed_duration > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "flight " + f.id + ": observed_duration must be > 0");
  }
}

void validate(const EtaDistribution& eta) {
  if (!(eta.sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eta sigma must be >= 0");
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [beta, q] : eta.quantiles) {
    if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::InvalidQuantile, "quantile level outside (0,1)");
    if (q < prev) throw Error(ErrorCode::InvalidArgument, "eta quantiles decrease in beta");
    prev = q;
  }
  if (!eta.quantiles.empty()) {
    const double lo = eta.quantiles.begin()->second;
    const double hi = eta.quantiles.rbegin()->second;
    if (eta.mu < lo || eta.mu > hi) throw Error(ErrorCode::InvalidArgument, "eta mu outside quantile range");
  }
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "infeasible";
}

namespace {

nlohmann::json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double number_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const FeatureVector& fv) {
  j = nlohmann::json::object();
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    j[std::string(kSchema[i].name)] = number_or_null(fv[i]);
  }
}

void from_json(const nlohmann::json& j, FeatureVector& fv) {
  std::vector<std::pair<std::string, double>> named;
  for (const auto& [key, value] : j.items()) named.emplace_back(key, number_from(value));
  fv = FeatureVector::from_named(named);
}

void to_json(nlohmann::json& j, const Flight& f) {
  j = nlohmann::json{
      {"id", f.id},
      {"callsign", f.callsign},
      {"ac_type", f.ac_type},
      {"weight_class", std::string(to_string(f.weight_class))},
      {"entry_time", f.entry_time},
      {"features", f.features},
      {"observed_duration", f.observed_duration ? nlohmann::json(*f.observed_duration) : nlohmann::json(nullptr)},
  };
}

void from_json(const nlohmann::json& j, Flight& f) {
  f.id = j.at("id").get<std::string>();
  f.callsign = j.at("callsign").get<std::string>();
  f.ac_type = j.at("ac_type").get<std::string>();
  auto wc = parse_weight_class(j.at("weight_class").get<std::string>());
  if (!wc) throw Error(ErrorCode::InvalidArgument, "unknown weight class");
  f.weight_class = *wc;
  f.entry_time = j.at("entry_time").get<double>();
  f.features = j.at("features").get<FeatureVector>();
  const auto& od = j.at("observed_duration");
  f.observed_duration = od.is_null() ? std::nullopt : std::optional<Seconds>(od.get<double>());
  validate(f);
}

}  // namespace als
