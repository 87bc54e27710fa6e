#pragma once

#include <span>

namespace als::gbm {

// Regression metrics over paired truth/prediction vectors. All throw
// LengthMismatch unless both spans are non-empty and equally long.

double mae(std::span<const double> y, std::span<const double> y_hat);
double rmse(std::span<const double> y, std::span<const double> y_hat);
/// Root mean squared difference of log(v + 1); throws RmsleDomain for any
/// value <= -1.
double rmsle(std::span<const double> y, std::span<const double> y_hat);

}  // namespace als::gbm
