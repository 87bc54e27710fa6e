#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "als/domain.hpp"

namespace als {

/// Leading class (row) by trailing class (column), in seconds.
class ReferenceMatrix {
public:
  /// FAA arrival-manager values.
  ReferenceMatrix();
  /// Throws InvalidArgument unless every entry is finite and > 0.
  explicit ReferenceMatrix(const std::array<std::array<double, 4>, 4>& seconds);

  double operator()(WeightClass lead, WeightClass trail) const {
    return t_[static_cast<std::size_t>(lead)][static_cast<std::size_t>(trail)];
  }
  const std::array<std::array<double, 4>, 4>& table() const { return t_; }

private:
  std::array<std::array<double, 4>, 4> t_;
};

/// Reads {"Heavy": {"Heavy": 82, ...}, ...} with all 16 entries present.
ReferenceMatrix reference_matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReferenceMatrix& m);

double reference_lookup(WeightClass lead, WeightClass trail);

double combine_sigma(double sigma_i, double sigma_j);

enum class QuantileConvention : std::uint8_t {
  /// T + z(1 - P_c) * sigma: smaller conflict probability, larger buffer.
  UpperTail,
  /// T + z(P_c) * sigma as literally written; clamped at zero.
  Literal,
};

/// Throws InvalidProbability unless 0 < p_c < 1, InvalidArgument unless
/// t_ref > 0 and sigma >= 0.
double required_separation(double t_ref, double sigma, double p_c,
                           QuantileConvention convention = QuantileConvention::UpperTail);

struct WindowParams {
  double slack_early = 120.0;
  double slack_late = 900.0;
  double k = 1.0;
};

/// [entry + mu - early - k*sigma, entry + mu + late + k*sigma].
std::pair<Seconds, Seconds> build_windows(Seconds entry_time, const EtaDistribution& eta, const WindowParams& params);

struct SeparationMatrix {
  std::size_t n = 0;
  double p_c = 0.05;
  /// Row-major n x n; diagonal entries are 0 and unused.
  std::vector<double> sep;
  std::vector<double> sigma_pair;
  std::vector<double> t_ref;
  std::vector<Seconds> lower;
  std::vector<Seconds> upper;

  double at(std::size_t i, std::size_t j) const { return sep[i * n + j]; }
  double sigma_at(std::size_t i, std::size_t j) const { return sigma_pair[i * n + j]; }
  double ref_at(std::size_t i, std::size_t j) const { return t_ref[i * n + j]; }
};

struct SeparationParams {
  double p_c = 0.05;
  WindowParams windows;
  QuantileConvention convention = QuantileConvention::UpperTail;
  ReferenceMatrix reference;
};

/// Times are relative to `origin` (subtracted from every entry time).
SeparationMatrix build_separation_matrix(std::span<const Flight> flights, std::span<const EtaDistribution> etas,
                                         const SeparationParams& params, Seconds origin = 0.0);

}  // namespace als
