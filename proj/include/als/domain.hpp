#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace als {

/// Time in seconds. Scenario-relative or epoch depending on the caller.
using Seconds = double;

enum class WeightClass : std::uint8_t { Heavy = 0, B757 = 1, Large = 2, Small = 3 };

inline constexpr std::array<WeightClass, 4> kWeightClasses = {
    WeightClass::Heavy, WeightClass::B757, WeightClass::Large, WeightClass::Small};

std::string_view to_string(WeightClass wc);
std::optional<WeightClass> parse_weight_class(std::string_view s);

/// Weight class for an ICAO type designator; unknown types are Large.
WeightClass weight_class_of(std::string_view ac_type);

/// Category index of an aircraft type in the bundled type table. Unknown
/// designators share the index `kOtherAcType`.
int ac_type_category(std::string_view ac_type);
std::string_view ac_type_name(int category);
std::size_t ac_type_category_count();
extern const int kOtherAcType;

enum class FeatureKind : std::uint8_t { Numeric, Categorical };

enum class FeatureGroup : std::uint8_t { FlightConditions, AircraftCounts, Events, Weather };

struct FeatureSpec {
  std::string_view name;
  FeatureKind kind;
  FeatureGroup group;
};

inline constexpr std::size_t kFeatureCount = 28;

/// Column positions in the flight feature schema.
namespace col {
inline constexpr std::size_t AcType = 0;
inline constexpr std::size_t Latitude = 1;
inline constexpr std::size_t Longitude = 2;
inline constexpr std::size_t Altitude = 3;
inline constexpr std::size_t Distance = 4;
inline constexpr std::size_t Time = 5;
inline constexpr std::size_t Hour = 6;
inline constexpr std::size_t GroundSpeed = 7;
inline constexpr std::size_t AcAhead600 = 8;
inline constexpr std::size_t AcAhead1800 = 9;
inline constexpr std::size_t AcAhead3600 = 10;
inline constexpr std::size_t AcBehind600 = 11;
inline constexpr std::size_t AcBehind1800 = 12;
inline constexpr std::size_t AcBehind3600 = 13;
inline constexpr std::size_t EvRrt600 = 14;
inline constexpr std::size_t EvRrt1800 = 15;
inline constexpr std::size_t EvRrt3600 = 16;
inline constexpr std::size_t EvLoop600 = 17;
inline constexpr std::size_t EvLoop1800 = 18;
inline constexpr std::size_t EvLoop3600 = 19;
inline constexpr std::size_t EvGoa600 = 20;
inline constexpr std::size_t EvGoa1800 = 21;
inline constexpr std::size_t EvGoa3600 = 22;
inline constexpr std::size_t WindSpeed = 23;
inline constexpr std::size_t WindDir = 24;
inline constexpr std::size_t CloudCover = 25;
inline constexpr std::size_t Visibility = 26;
inline constexpr std::size_t Humidity = 27;
}  // namespace col

const std::array<FeatureSpec, kFeatureCount>& feature_schema();
std::optional<std::size_t> feature_index(std::string_view name);

/// One schema-ordered feature row. Numeric entries may be NaN (missing);
/// the acType entry holds a category index as a double.
class FeatureVector {
public:
  FeatureVector() { values_.fill(0.0); }

  /// Throws SchemaMismatch unless exactly kFeatureCount values are given.
  static FeatureVector from_values(std::span<const double> values);

  /// Closed-schema construction by column name: every column must be
  /// present exactly once and no unknown names are accepted.
  static FeatureVector from_named(const std::vector<std::pair<std::string, double>>& named);

  double operator[](std::size_t i) const { return values_.at(i); }
  std::span<const double> values() const { return values_; }

  /// NaN-aware equality (two missing values compare equal).
  friend bool operator==(const FeatureVector& a, const FeatureVector& b);

private:
  explicit FeatureVector(const std::array<double, kFeatureCount>& v);
  static void validate(const std::array<double, kFeatureCount>& v);

  std::array<double, kFeatureCount> values_{};
};

struct Flight {
  std::string id;
  std::string callsign;
  std::string ac_type;
  WeightClass weight_class = WeightClass::Large;
  Seconds entry_time = 0.0;
  FeatureVector features;
  std::optional<Seconds> observed_duration;

  friend bool operator==(const Flight&, const Flight&) = default;
};

/// Throws InvalidArgument when a Flight invariant does not hold.
void validate(const Flight& f);

/// Predicted landing-duration distribution for one flight.
struct EtaDistribution {
  Seconds mu = 0.0;
  Seconds sigma = 0.0;
  std::map<double, Seconds> quantiles;
};

void validate(const EtaDistribution& eta);

enum class SolveStatus : std::uint8_t { Optimal, Infeasible, TimeLimit };
std::string_view to_string(SolveStatus s);

struct SolverStats {
  std::uint64_t nodes = 0;
  double wall_ms = 0.0;
};

/// A landing order with its times. `landing_times[i]` belongs to flight i of
/// the model; `order` lists flight indices from first to last touchdown.
struct ScheduleSolution {
  std::vector<std::size_t> order;
  std::vector<Seconds> landing_times;
  Seconds makespan = 0.0;
  Seconds objective = 0.0;
  bool feasible = false;
  SolveStatus status = SolveStatus::Infeasible;
  SolverStats stats;
};

void to_json(nlohmann::json& j, const FeatureVector& fv);
void from_json(const nlohmann::json& j, FeatureVector& fv);
void to_json(nlohmann::json& j, const Flight& f);
void from_json(const nlohmann::json& j, Flight& f);

}  // namespace als
