#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qpe/counts.hpp"
#include "qpe/rng.hpp"
#include "qpe/spectrum.hpp"

namespace qpe {

/// One ancilla round: k controlled-U applications, then Rz(beta), then an
/// X-basis measurement.
struct RoundSpec {
  int k = 1;
  double beta = 0.0;

  friend bool operator==(const RoundSpec&, const RoundSpec&) = default;
};

/// The rounds of one experiment (one state preparation).
class ExperimentSpec {
public:
  ExperimentSpec() = default;
  /// Throws std::invalid_argument for an empty list or any k < 1.
  explicit ExperimentSpec(std::vector<RoundSpec> rounds);

  static ExperimentSpec single(int k, double beta) { return ExperimentSpec({{k, beta}}); }

  std::span<const RoundSpec> rounds() const { return rounds_; }
  std::size_t size() const { return rounds_.size(); }
  bool is_single_round() const { return rounds_.size() == 1; }

  /// K = sum of k_r over the rounds.
  int total_k() const { return total_k_; }

  /// True for the K-round design with every k_r = 1, half the rounds at
  /// beta = 0 and half at beta = pi/2 (in any order).
  bool is_hamming_design() const;

private:
  std::vector<RoundSpec> rounds_;
  int total_k_ = 0;
};

/// Depolarizing channel on the ancilla outcome: with probability
/// 1 - exp(-k / k_err) the bit is replaced by a fair coin.
struct NoiseModel {
  enum class Kind { none, depolarizing };

  Kind kind = Kind::none;
  double k_err = 0.0;

  static NoiseModel none() { return {}; }
  /// Throws std::invalid_argument unless k_err > 0.
  static NoiseModel depolarizing(double k_err);

  bool is_noisy() const { return kind == Kind::depolarizing; }
  /// p(k) = exp(-k / k_err), or 1 without noise.
  double fidelity(int k) const;
};

/// p -> p e^{-k/k_err} + (1 - e^{-k/k_err}) / 2
double apply_depolarizing(double p, int k, double k_err);

/// Noiseless single-eigenphase round likelihood cos^2(k phi / 2 + (beta - m pi) / 2).
double round_likelihood(double phase, int k, double beta, int m);

/// sum_j A_j cos^2(k phi_j / 2 + (beta - m pi) / 2), optionally depolarized.
double round_outcome_prob(const Spectrum& spectrum, int k, double beta, int m,
                          const NoiseModel& noise = NoiseModel::none());

/// sum_j A_j prod_r P_{k_r, beta_r}(m_r | phi_j). With noise each round is
/// depolarized independently with its own k_r.
double experiment_outcome_prob(const Spectrum& spectrum, const ExperimentSpec& spec,
                               std::span<const int> outcomes,
                               const NoiseModel& noise = NoiseModel::none());

/// Probability of Hamming weights (hw0, hw1) among the beta = 0 and
/// beta = pi/2 rounds of the K-round k = 1 design. K must be even.
double hamming_prob(const Spectrum& spectrum, int total_k, int hw0, int hw1,
                    const NoiseModel& noise = NoiseModel::none());

/// Full (K/2 + 1) x (K/2 + 1) table, row-major in hw0.
std::vector<double> hamming_distribution(const Spectrum& spectrum, int total_k,
                                         const NoiseModel& noise = NoiseModel::none());

/// Draws one outcome string for `spec`.
std::vector<int> sample_experiment(const Spectrum& spectrum, const ExperimentSpec& spec,
                                   const NoiseModel& noise, Rng& rng);

struct ScheduleEntry {
  ExperimentSpec spec;
  std::uint64_t repetitions = 0;
};
using Schedule = std::vector<ScheduleEntry>;

/// Draws aggregated tallies for a whole schedule. Outcomes of repeated
/// experiments are exchangeable, so each key is drawn from its exact
/// binomial / multinomial law instead of shot by shot.
///
/// All entries must be single-round, or all must be the K-round Hamming
/// design with the same K; anything else throws std::invalid_argument.
AggregatedCounts sample_schedule(const Spectrum& spectrum, const Schedule& schedule,
                                 const NoiseModel& noise, Rng& rng);

/// Seeded convenience wrapper around sample_schedule.
AggregatedCounts run_schedule(const Spectrum& spectrum, const Schedule& schedule,
                              const NoiseModel& noise, std::uint64_t seed);

}  // namespace qpe
