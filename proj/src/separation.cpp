#include "als/separation.hpp"

#include <algorithm>
#include <cmath>

#include "als/error.hpp"
#include "als/normal.hpp"

namespace als {

namespace {

constexpr std::array<std::array<double, 4>, 4> kFaaTable = {{
    {82, 118, 118, 150},
    {60, 64, 64, 94},
    {60, 64, 64, 94},
    {60, 64, 64, 94},
}};

}  // namespace

ReferenceMatrix::ReferenceMatrix() : t_(kFaaTable) {}

ReferenceMatrix::ReferenceMatrix(const std::array<std::array<double, 4>, 4>& seconds) : t_(seconds) {
  for (const auto& row : t_) {
    for (double v : row) {
      if (!std::isfinite(v) || v <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "reference separations must be finite and positive");
      }
    }
  }
}

ReferenceMatrix reference_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 4) throw Error(ErrorCode::InvalidArgument, "reference matrix needs 4 rows");
  std::array<std::array<double, 4>, 4> t{};
  for (auto lead : kWeightClasses) {
    const auto& row = j.at(std::string(to_string(lead)));
    if (!row.is_object() || row.size() != 4) {
      throw Error(ErrorCode::InvalidArgument, "reference row " + std::string(to_string(lead)) + " needs 4 entries");
    }
    for (auto trail : kWeightClasses) {
      t[static_cast<std::size_t>(lead)][static_cast<std::size_t>(trail)] =
          row.at(std::string(to_string(trail))).get<double>();
    }
  }
  return ReferenceMatrix(t);
}

nlohmann::json to_json(const ReferenceMatrix& m) {
  nlohmann::json j = nlohmann::json::object();
  for (auto lead : kWeightClasses) {
    for (auto trail : kWeightClasses) j[std::string(to_string(lead))][std::string(to_string(trail))] = m(lead, trail);
  }
  return j;
}

double reference_lookup(WeightClass lead, WeightClass trail) {
  static const ReferenceMatrix faa;
  return faa(lead, trail);
}

double combine_sigma(double sigma_i, double sigma_j) { return std::hypot(sigma_i, sigma_j); }

double required_separation(double t_ref, double sigma, double p_c, QuantileConvention convention) {
  if (!(p_c > 0.0 && p_c < 1.0)) throw Error(ErrorCode::InvalidProbability, "conflict probability must lie in (0,1)");
  if (!(t_ref > 0.0) || !(sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "separation needs t_ref > 0 and sigma >= 0");
  }
  if (sigma == 0.0 || p_c == 0.5) return t_ref;
  if (convention == QuantileConvention::UpperTail) return t_ref + normal_quantile(1.0 - p_c) * sigma;
  return std::max(0.0, t_ref + normal_quantile(p_c) * sigma);
}

std::pair<Seconds, Seconds> build_windows(Seconds entry_time, const EtaDistribution& eta,
                                          const WindowParams& params) {
  if (!(params.slack_early >= 0.0) || !(params.slack_late >= 0.0) || !(params.k >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "window slacks and k must be non-negative");
  }
  const double center = entry_time + eta.mu;
  const double spread = params.k * eta.sigma;
  return {center - params.slack_early - spread, center + params.slack_late + spread};
}

SeparationMatrix build_separation_matrix(std::span<const Flight> flights, std::span<const EtaDistribution> etas,
                                         const SeparationParams& params, Seconds origin) {
  if (flights.size() != etas.size()) throw Error(ErrorCode::LengthMismatch, "one ETA per flight is required");
  const std::size_t n = flights.size();
  SeparationMatrix m;
  m.n = n;
  m.p_c = params.p_c;
  m.sep.assign(n * n, 0.0);
  m.sigma_pair.assign(n * n, 0.0);
  m.t_ref.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [l, u] = build_windows(flights[i].entry_time - origin, etas[i], params.windows);
    m.lower.push_back(l);
    m.upper.push_back(u);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double t = params.reference(flights[i].weight_class, flights[j].weight_class);
      const double s = combine_sigma(etas[i].sigma, etas[j].sigma);
      m.t_ref[i * n + j] = t;
      m.sigma_pair[i * n + j] = s;
      m.sep[i * n + j] = required_separation(t, s, params.p_c, params.convention);
    }
  }
  return m;
}

}  // namespace als
