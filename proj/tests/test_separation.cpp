#include <doctest.h>

#include <cmath>

#include "als/error.hpp"
#include "als/separation.hpp"
#include "support.hpp"

using namespace als;

namespace {

constexpr double kReference[4][4] = {
    {82, 118, 118, 150},
    {60, 64, 64, 94},
    {60, 64, 64, 94},
    {60, 64, 64, 94},
};

EtaDistribution eta(double mu, double sigma) {
  EtaDistribution e;
  e.mu = mu;
  e.sigma = sigma;
  return e;
}

}  // namespace

TEST_CASE("reference table") {
  for (auto lead : kWeightClasses) {
    for (auto trail : kWeightClasses) {
      CHECK(reference_lookup(lead, trail) == kReference[static_cast<int>(lead)][static_cast<int>(trail)]);
    }
  }
  CHECK(reference_lookup(WeightClass::Heavy, WeightClass::Small) == 150);
  CHECK(reference_lookup(WeightClass::B757, WeightClass::Heavy) == 60);
  CHECK(reference_lookup(WeightClass::Large, WeightClass::Large) == 64);
  CHECK(reference_lookup(WeightClass::Heavy, WeightClass::Large) != reference_lookup(WeightClass::Large, WeightClass::Heavy));
}

TEST_CASE("reference matrix overrides") {
  const auto j = to_json(ReferenceMatrix{});
  CHECK(j["Heavy"]["Small"] == 150);
  const auto back = reference_matrix_from_json(j);
  CHECK(back.table() == ReferenceMatrix{}.table());
  auto custom = j;
  custom["Large"]["Large"] = 70;
  CHECK(reference_matrix_from_json(custom)(WeightClass::Large, WeightClass::Large) == 70);
  auto zero = j;
  zero["Small"]["Heavy"] = 0;
  CHECK_THROWS_AS(reference_matrix_from_json(zero), Error);
  auto missing = j;
  missing["B757"].erase("Small");
  CHECK_THROWS_AS(reference_matrix_from_json(missing), Error);
}

TEST_CASE("combine sigma") {
  CHECK(combine_sigma(3, 4) == 5);
  CHECK(combine_sigma(0, 0) == 0);
  CHECK(combine_sigma(7.5, 0) == 7.5);
  CHECK(combine_sigma(2, 9) == combine_sigma(9, 2));
}

TEST_CASE("required separation") {
  CHECK(required_separation(64, 0, 0.05) == 64);
  CHECK(required_separation(64, 0, 0.3) == 64);
  CHECK(required_separation(64, 12, 0.5) == 64);
  const double z95 = testing::bisect_normal_quantile(0.95);
  CHECK(std::abs(required_separation(64, 5, 0.05) - (64 + 5 * z95)) < 1e-8);
  CHECK(required_separation(64, 5, 0.05) == doctest::Approx(72.2243).epsilon(1e-6));
  CHECK(required_separation(64, 5, 0.05, QuantileConvention::Literal) == doctest::Approx(64 - 5 * z95).epsilon(1e-12));
  CHECK(required_separation(64, 100, 0.05, QuantileConvention::Literal) == 0.0);
  try {
    required_separation(64, 5, 1.0);
    FAIL("expected InvalidProbability");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidProbability);
  }
  CHECK_THROWS_AS(required_separation(64, 5, 0.0), Error);
  CHECK_THROWS_AS(required_separation(0, 5, 0.05), Error);
  CHECK_THROWS_AS(required_separation(64, -1, 0.05), Error);
}

TEST_CASE("bisection oracle agreement over the grid") {
  for (double p : {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    for (double s : {0.1, 0.5, 1.0, 5.0, 10.0, 20.0, 50.0}) {
      CAPTURE(p);
      CAPTURE(s);
      const double want = 64 + s * testing::bisect_normal_quantile(1 - p);
      CHECK(std::abs(required_separation(64, s, p) - want) <= 1e-6);
    }
  }
}

TEST_CASE("monotonicity") {
  for (double s : {0.5, 5.0, 30.0}) {
    double prev = 0;
    for (double p : {0.45, 0.3, 0.2, 0.1, 0.05, 0.01}) {
      const double v = required_separation(94, s, p);
      CHECK(v > prev);
      CHECK(v >= 94);
      prev = v;
    }
  }
  double prev = 0;
  for (double s : {0.0, 1.0, 2.0, 8.0, 40.0}) {
    const double v = required_separation(94, s, 0.1);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("windows") {
  auto [l0, u0] = build_windows(500, eta(1000, 0), {0, 0, 1});
  CHECK(l0 == 1500);
  CHECK(u0 == 1500);
  auto [l, u] = build_windows(0, eta(1200, 10), {60, 120, 1});
  CHECK(l == 1130);
  CHECK(u == 1330);
  double prev_l = l, prev_u = u;
  for (double s : {12.0, 20.0, 40.0}) {
    auto [ll, uu] = build_windows(0, eta(1200, s), {60, 120, 1});
    CHECK(ll <= prev_l);
    CHECK(uu >= prev_u);
    prev_l = ll;
    prev_u = uu;
  }
  CHECK_THROWS_AS(build_windows(0, eta(1, 1), {-1, 0, 1}), Error);
}

TEST_CASE("separation matrix") {
  SUBCASE("two Large flights, no spread") {
    const auto flights = testing::make_flights({0, 30}, {WeightClass::Large});
    const std::vector<EtaDistribution> etas = {eta(1000, 0), eta(1000, 0)};
    SeparationParams p;
    p.p_c = 0.5;
    const auto m = build_separation_matrix(flights, etas, p);
    CHECK(m.at(0, 1) == 64);
    CHECK(m.at(1, 0) == 64);
  }
  SUBCASE("Heavy leading Small keeps the asymmetry") {
    const auto flights = testing::make_flights({0, 30}, {WeightClass::Heavy, WeightClass::Small});
    const std::vector<EtaDistribution> etas = {eta(1000, 0), eta(1000, 0)};
    const auto m = build_separation_matrix(flights, etas, SeparationParams{});
    CHECK(m.at(0, 1) == 150);
    CHECK(m.at(1, 0) == 60);
    const std::vector<EtaDistribution> spread = {eta(1000, 6), eta(1000, 6)};
    const auto ms = build_separation_matrix(flights, spread, SeparationParams{});
    CHECK(ms.at(0, 1) > ms.at(1, 0));
  }
  SUBCASE("mixed sigma matches scalar recomputation") {
    const std::vector<WeightClass> classes = {WeightClass::Heavy, WeightClass::B757, WeightClass::Large,
                                              WeightClass::Small, WeightClass::Large};
    const auto flights = testing::make_flights({0, 40, 70, 95, 130}, classes);
    const std::vector<EtaDistribution> etas = {eta(1100, 3), eta(1150, 0), eta(1000, 12.5), eta(1200, 7), eta(990, 1)};
    SeparationParams p;
    p.p_c = 0.1;
    const auto m = build_separation_matrix(flights, etas, p, 20.0);
    const double z = testing::bisect_normal_quantile(0.9);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(m.lower[i] == doctest::Approx(flights[i].entry_time - 20 + etas[i].mu - 120 - etas[i].sigma));
      CHECK(m.upper[i] == doctest::Approx(flights[i].entry_time - 20 + etas[i].mu + 900 + etas[i].sigma));
      for (std::size_t j = 0; j < 5; ++j) {
        if (i == j) continue;
        const double t = kReference[static_cast<int>(classes[i])][static_cast<int>(classes[j])];
        const double s = std::sqrt(etas[i].sigma * etas[i].sigma + etas[j].sigma * etas[j].sigma);
        CHECK(m.ref_at(i, j) == t);
        CHECK(m.sigma_at(i, j) == doctest::Approx(s).epsilon(1e-14));
        CHECK(std::abs(m.at(i, j) - (t + z * s)) < 1e-8);
      }
    }
  }
  SUBCASE("length mismatch") {
    const auto flights = testing::make_flights({0, 30}, {WeightClass::Large});
    const std::vector<EtaDistribution> etas = {eta(1000, 0)};
    CHECK_THROWS_AS(build_separation_matrix(flights, etas, SeparationParams{}), Error);
  }
}
