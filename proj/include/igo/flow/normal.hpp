#pragma once

namespace igo::normal {

/// Standard normal density.
double pdf(double z);

/// Standard normal CDF, Phi(z) = erfc(-z / sqrt 2) / 2.
double cdf(double z);

/// Phi^-1(u) for u in (0, 1); -inf / +inf at the endpoints.
double quantile(double u);

}  // namespace igo::normal
