#include <doctest.h>

#include <cmath>

#include "als/normal.hpp"
#include "support.hpp"

using namespace als;

TEST_CASE("known quantiles") {
  // Reference digits from mpmath erfinv at 40 significant digits.
  CHECK(std::abs(normal_quantile(0.95) - 1.64485362695147271486) < 1e-14);
  CHECK(std::abs(normal_quantile(0.975) - 1.95996398454005423552) < 1e-14);
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.05) == doctest::Approx(-normal_quantile(0.95)).epsilon(1e-15));
}

TEST_CASE("edges") {
  CHECK(std::isinf(normal_quantile(0.0)));
  CHECK(normal_quantile(0.0) < 0);
  CHECK(std::isinf(normal_quantile(1.0)));
  CHECK(std::isnan(normal_quantile(-0.1)));
  CHECK(std::isnan(normal_quantile(1.5)));
}

TEST_CASE("agrees with bisection on the erfc cdf") {
  for (double p = 0.001; p < 0.9995; p += 0.00731) {
    CAPTURE(p);
    CHECK(std::abs(normal_quantile(p) - testing::bisect_normal_quantile(p)) < 1e-9);
  }
  for (double p : {1e-10, 1e-6, 1e-3, 0.999999}) {
    CAPTURE(p);
    CHECK(std::abs(normal_quantile(p) - testing::bisect_normal_quantile(p)) < 1e-8);
  }
}

TEST_CASE("cdf inverts the quantile") {
  for (double p = 0.01; p < 1.0; p += 0.01) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}
