#pragma once

#include <cmath>

namespace qpe::detail {

/// C(n, k) as a floating value; exact for the ranges used here (n <= ~60
/// in double, larger n are accurate to rounding).
template <typename Real = double>
Real binomial(int n, int k) {
  if (k < 0 || k > n) return Real(0);
  if (k > n - k) k = n - k;
  Real c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<Real>(n - k + i) / static_cast<Real>(i);
  }
  return c;
}

/// Binomial pmf with the p = 0 and p = 1 edges handled exactly.
inline double binomial_pmf(int n, int x, double p) {
  if (x < 0 || x > n) return 0.0;
  if (p <= 0.0) return x == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return x == n ? 1.0 : 0.0;
  if (n <= 1000) {
    return binomial<double>(n, x) * std::pow(p, x) * std::pow(1.0 - p, n - x);
  }
  const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) +
                         x * std::log(p) + (n - x) * std::log1p(-p);
  return std::exp(log_pmf);
}

}  // namespace qpe::detail
