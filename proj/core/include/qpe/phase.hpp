#pragma once

#include <compare>
#include <numbers>

namespace qpe {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps any finite angle onto the canonical interval [-pi, pi).
/// Throws std::domain_error for NaN or infinite input.
double wrap_phase(double radians);

/// An eigenphase on the unit circle, always stored in [-pi, pi).
class Phase {
public:
  constexpr Phase() = default;
  /// Wraps the argument; Phase(kPi).radians() == -kPi.
  explicit Phase(double radians) : value_(wrap_phase(radians)) {}

  constexpr double radians() const { return value_; }

  friend constexpr auto operator<=>(const Phase&, const Phase&) = default;

private:
  double value_ = 0.0;
};

/// Shortest arc length between two phases, in [0, pi].
double circular_distance(Phase a, Phase b);

/// Signed difference a - b wrapped to [-pi, pi).
double signed_difference(Phase a, Phase b);

}  // namespace qpe
