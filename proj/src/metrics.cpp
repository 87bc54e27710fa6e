#include "als/gbm/metrics.hpp"

#include <cmath>
#include <string>

#include "als/error.hpp"

namespace als::gbm {

namespace {

void check_lengths(std::span<const double> y, std::span<const double> y_hat) {
  if (y.empty() || y.size() != y_hat.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "metric inputs have lengths " + std::to_string(y.size()) + " and " + std::to_string(y_hat.size()));
  }
}

}  // namespace

double mae(std::span<const double> y, std::span<const double> y_hat) {
  check_lengths(y, y_hat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - y_hat[i]);
  return s / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> y_hat) {
  check_lengths(y, y_hat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_hat[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

double rmsle(std::span<const double> y, std::span<const double> y_hat) {
  check_lengths(y, y_hat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > -1.0) || !(y_hat[i] > -1.0)) {
      throw Error(ErrorCode::RmsleDomain, "RMSLE needs values > -1");
    }
    const double d = std::log1p(y[i]) - std::log1p(y_hat[i]);
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

}  // namespace als::gbm
