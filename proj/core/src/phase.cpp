#include "qpe/phase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpe {

double wrap_phase(double radians) {
  if (!std::isfinite(radians)) {
    throw std::domain_error("wrap_phase: non-finite angle");
  }
  double shifted = std::fmod(radians + kPi, kTwoPi);
  if (shifted < 0.0) shifted += kTwoPi;
  double wrapped = shifted - kPi;
  // fmod can land exactly on 2*pi after the correction above.
  if (wrapped >= kPi) wrapped -= kTwoPi;
  return wrapped;
}

double circular_distance(Phase a, Phase b) {
  const double d = std::abs(a.radians() - b.radians());
  return std::min(d, kTwoPi - d);
}

double signed_difference(Phase a, Phase b) {
  return wrap_phase(a.radians() - b.radians());
}

}  // namespace qpe
