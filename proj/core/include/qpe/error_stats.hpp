#pragma once

#include <span>

#include "qpe/phase.hpp"

namespace qpe {

/// Error of repeated phase estimates against the truth.
///  mean_abs   = < d >,  rms = sqrt(< d^2 >), d the circular distance;
///  holevo_var = |< exp(i (est - truth)) >|^-2 - 1  (+inf for a zero phasor).
struct ErrorStats {
  double mean_abs = 0.0;
  double rms = 0.0;
  double holevo_var = 0.0;
};

ErrorStats error_stats(Phase truth, std::span<const Phase> estimates);

/// Per-trial truths, for campaigns that draw a new spectrum every trial.
ErrorStats error_stats(std::span<const Phase> truths, std::span<const Phase> estimates);

}  // namespace qpe
