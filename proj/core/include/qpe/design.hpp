#pragma once

#include <cstdint>
#include <iosfwd>

#include "qpe/rng.hpp"
#include "qpe/simulator.hpp"

namespace qpe {

/// Single-round cells (k, beta) for k = 1..K and beta in {0, pi/2}, in that
/// order, N experiments in total. N / (2K) go to every cell and the
/// remainder is handed out one per cell from the front.
/// Throws std::invalid_argument for K < 1.
Schedule ts_single_round_schedule(int K, std::uint64_t N);

/// The K-round design: every k_r = 1, the K/2 beta = 0 rounds first, then
/// K/2 rounds at beta = pi/2. Throws std::invalid_argument for odd K.
ExperimentSpec ts_multi_round_schedule(int K);

/// Schedule of N repetitions of ts_multi_round_schedule(K).
Schedule ts_multi_round_campaign(int K, std::uint64_t N);

/// K = min(ceil(1.25 / sigma), cap); sigma that is not finite and positive
/// (no estimate yet) gives K = 1.
int adaptive_k(double sigma, int cap);

/// Experiment chooser for the Bayesian estimator. k cycles through 1..K
/// (or is drawn uniformly with `random_k`), beta is uniform on [0, 2pi).
class AdaptiveDesign {
public:
  explicit AdaptiveDesign(int k_cap, bool random_k = false);

  RoundSpec next(double sigma, Rng& rng);

  int k_cap() const { return k_cap_; }
  std::uint64_t issued() const { return counter_; }
  /// Sum of k over every issued round.
  std::uint64_t total_applications() const { return total_k_; }

private:
  int k_cap_;
  bool random_k_;
  std::uint64_t counter_ = 0;
  std::uint64_t total_k_ = 0;
};

/// CSV rows experiment_id,round_id,k,beta,repetitions (one row per round of
/// every schedule entry).
void write_schedule_csv(std::ostream& out, const Schedule& schedule);

}  // namespace qpe
