#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qpe/amplitude_belief.hpp"
#include "qpe/fourier_posterior.hpp"

namespace qpe {

/// Independent marginals over N_track eigenphases plus a belief over their
/// overlaps. Index 0 is the target eigenvalue.
///
/// Tracked eigenvalues that start with identical marginals and identical
/// prior amplitudes stay exchangeable under every update, so they are
/// stored once as a class. B is re-averaged inside each class after the
/// Newton step, which only removes rounding differences.
class MultiEigPosterior {
public:
  MultiEigPosterior() = default;
  /// Groups indices whose marginals are coefficient-wise equal and whose
  /// prior mean and current B entries agree.
  MultiEigPosterior(const std::vector<FourierPosterior>& marginals, AmplitudeBelief belief);

  /// Flat marginals and the default amplitude prior.
  static MultiEigPosterior flat(int n_track, int n_freq, double a0 = 0.5, double prior_sigma = 0.1);

  int size() const { return static_cast<int>(class_of_.size()); }
  const FourierPosterior& marginal(int j) const;
  int class_count() const { return static_cast<int>(classes_.size()); }
  const AmplitudeBelief& belief() const { return belief_; }
  std::uint64_t experiments() const { return experiments_; }
  /// Experiments dropped because their predicted probability B . q was not
  /// positive (possible once truncation makes a marginal negative somewhere).
  std::uint64_t skipped() const { return skipped_; }
  /// Truncation events summed over the tracked eigenvalues.
  std::uint64_t truncations() const;

  /// One experiment: every marginal j becomes proportional to
  /// (C_j + B_j L) P_j with L the likelihood of the outcomes and
  /// C_j = sum_{i != j} B_i q_i; then one Newton step on the amplitudes.
  void update(std::span<const RoundSpec> rounds, std::span<const int> outcomes,
              const NoiseModel& noise = NoiseModel::none());

private:
  std::vector<FourierPosterior> classes_;
  std::vector<int> class_of_;
  AmplitudeBelief belief_;
  std::uint64_t experiments_ = 0;
  std::uint64_t skipped_ = 0;
};

void update_multi(MultiEigPosterior& mp, std::span<const RoundSpec> rounds,
                  std::span<const int> outcomes, const NoiseModel& noise = NoiseModel::none());

/// True when two phases sit closer than `threshold` on the circle.
bool rejection_check(std::span<const Phase> phases, double threshold = 0.05);

}  // namespace qpe
