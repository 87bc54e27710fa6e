#pragma once

// Helpers shared by the unit suites and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "als/domain.hpp"
#include "als/rng.hpp"
#include "als/separation.hpp"

namespace als::testing {

/// Standard normal quantile by bisection on the erfc-based CDF; used as an
/// independent check of normal_quantile.
inline double bisect_normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    if (cdf < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Flights with ids "A00", "A01", ... entering at the given times.
inline std::vector<Flight> make_flights(const std::vector<double>& entries, const std::vector<WeightClass>& classes) {
  std::vector<Flight> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Flight f;
    f.id = "A" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    f.callsign = "TST" + std::to_string(100 + i);
    f.ac_type = "B738";
    f.weight_class = classes[i % classes.size()];
    f.entry_time = entries[i];
    out.push_back(f);
  }
  return out;
}

/// Separation matrix with uniform ť and explicit windows.
inline SeparationMatrix uniform_matrix(const std::vector<double>& lower, const std::vector<double>& upper,
                                       double sep) {
  SeparationMatrix m;
  m.n = lower.size();
  m.sep.assign(m.n * m.n, sep);
  m.sigma_pair.assign(m.n * m.n, 0.0);
  m.t_ref.assign(m.n * m.n, sep);
  for (std::size_t i = 0; i < m.n; ++i) {
    m.sep[i * m.n + i] = 0.0;
    m.t_ref[i * m.n + i] = 0.0;
  }
  m.lower = lower;
  m.upper = upper;
  return m;
}

struct RandomInstance {
  std::vector<Flight> flights;
  std::vector<EtaDistribution> etas;
  SeparationParams params;
};

/// Random n-aircraft instance: mixed weight classes, entries spread over a
/// few minutes, sigma uniform in [0, sigma_max], p_c from {0.05, 0.1, 0.5}.
inline RandomInstance random_instance(Rng& rng, std::size_t n, double sigma_max) {
  static constexpr double kPc[] = {0.05, 0.1, 0.5};
  RandomInstance inst;
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t += rng.uniform(10.0, 120.0);
    Flight f;
    f.id = "R" + std::to_string(10 + i);
    f.callsign = f.id;
    f.ac_type = "B738";
    f.weight_class = kWeightClasses[rng.below(4)];
    f.entry_time = t;
    inst.flights.push_back(f);
    EtaDistribution eta;
    eta.mu = rng.uniform(900.0, 1300.0);
    eta.sigma = rng.uniform(0.0, sigma_max);
    eta.quantiles = {{0.5, eta.mu}};
    inst.etas.push_back(eta);
  }
  inst.params.p_c = kPc[rng.below(3)];
  inst.params.windows = {rng.uniform(60.0, 300.0), rng.uniform(120.0, 600.0), 1.0};
  return inst;
}

}  // namespace als::testing
