#pragma once

namespace als {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (inverse CDF) for p in (0, 1), using Wichura's
/// AS 241 rational approximations (about 1e-16 relative accuracy).
/// Returns -inf/+inf at 0/1 and NaN outside [0, 1].
double normal_quantile(double p);

}  // namespace als
