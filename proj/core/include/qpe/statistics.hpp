#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qpe {

struct ConfidenceInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Percentile bootstrap of `statistic` over `resamples` resamples with
/// replacement, drawn from a generator seeded with `seed`.
ConfidenceInterval bootstrap_ci(std::span<const double> values,
                                const std::function<double(std::span<const double>)>& statistic,
                                int resamples = 1000, double level = 0.95, std::uint64_t seed = 0);

double mean(std::span<const double> values);
double root_mean_square(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least-squares line through (x, y); throws with fewer than two
/// points or constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of log y against log x; all values must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace qpe
