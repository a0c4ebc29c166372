#include "qpe/error_stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qpe {

ErrorStats error_stats(std::span<const Phase> truths, std::span<const Phase> estimates) {
  if (estimates.empty()) throw std::invalid_argument("error_stats: no estimates");
  if (truths.size() != estimates.size()) {
    throw std::invalid_argument("error_stats: truths and estimates differ in length");
  }
  double sum_abs = 0.0;
  double sum_sq = 0.0;
  std::complex<double> phasor{0.0, 0.0};
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = circular_distance(truths[i], estimates[i]);
    sum_abs += d;
    sum_sq += d * d;
    phasor += std::polar(1.0, estimates[i].radians() - truths[i].radians());
  }
  const double n = static_cast<double>(estimates.size());
  ErrorStats stats;
  stats.mean_abs = sum_abs / n;
  stats.rms = std::sqrt(sum_sq / n);
  const double r2 = std::norm(phasor / n);
  // Phasors that cancel to rounding level are treated as exactly zero.
  stats.holevo_var =
      r2 <= 1e-24 ? std::numeric_limits<double>::infinity() : std::max(0.0, 1.0 / r2 - 1.0);
  return stats;
}

ErrorStats error_stats(Phase truth, std::span<const Phase> estimates) {
  std::vector<Phase> truths(estimates.size(), truth);
  return error_stats(truths, estimates);
}

}  // namespace qpe
