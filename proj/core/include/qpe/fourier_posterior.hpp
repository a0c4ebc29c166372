#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "qpe/phase.hpp"
#include "qpe/simulator.hpp"

namespace qpe {

/// A 2pi-periodic density on the phase, truncated at n_freq - 1 harmonics:
///   P(phi) = p0 + sum_{n>=1} p_{2n-1} sin(n phi) + p_{2n} cos(n phi).
///
/// Internally the coefficients are kept as Z_n with P = sum_n Z_n e^{i n phi},
/// Z_{-n} = conj Z_n, so a likelihood update is a three-term stencil over
/// the occupied band. Components pushed beyond n_freq - 1 are dropped; the
/// number of updates that dropped something is counted.
class FourierPosterior {
public:
  /// Flat prior 1/(2pi). Throws std::invalid_argument if n_freq < 2.
  static FourierPosterior flat(int n_freq);

  /// From the real layout (p0, sin 1, cos 1, sin 2, ...) of length
  /// 2 n_freq - 1. The vector is taken as given (not renormalized).
  static FourierPosterior from_coefficients(std::span<const double> p);

  int n_freq() const { return static_cast<int>(z_.size()); }
  /// Highest harmonic with a (possibly) non-zero coefficient.
  int bandwidth() const { return bandwidth_; }
  std::uint64_t truncations() const { return truncations_; }

  /// Real layout, length 2 n_freq - 1.
  std::vector<double> coefficients() const;
  std::complex<double> z(int n) const;

  /// Multiply by the (noise-adjusted) likelihood of outcome m for a round
  /// (k, beta) and renormalize so that p0 = 1/(2pi).
  void update(int k, double beta, int m, const NoiseModel& noise = NoiseModel::none());

  /// Multiply by the likelihood without renormalizing.
  void multiply_likelihood(int k, double beta, int m, const NoiseModel& noise = NoiseModel::none());
  /// this = c * this + b * L * this for the likelihood L of one round, in a
  /// single pass; no renormalization.
  void mix_likelihood(double c, double b, int k, double beta, int m,
                      const NoiseModel& noise = NoiseModel::none());
  /// Rescale so that p0 = 1/(2pi). Throws std::runtime_error if the mass is
  /// not positive or a coefficient overflows.
  void renormalize();

  /// Integral of the represented function over the circle (2pi p0).
  double mass() const;

  /// arg(p2 + i p1), or nullopt when the first harmonic vanishes.
  std::optional<Phase> estimate_phase() const;
  /// 1 / (pi^2 (p1^2 + p2^2)) - 1; +inf when the first harmonic vanishes.
  double holevo_var() const;

  double density(double phase) const;
  /// Density on `points` equispaced phases starting at -pi.
  std::vector<double> density_grid(int points) const;
  /// Smallest density value on the grid; negative values flag truncation
  /// ringing.
  double min_density(int points = 2048) const;

  /// Scale every coefficient (used by mixture updates).
  void scale(double factor);
  /// this = a * this + b * other; both must share n_freq.
  void combine(double a, double b, const FourierPosterior& other);

private:
  explicit FourierPosterior(int n_freq) : z_(static_cast<std::size_t>(n_freq), 0.0) {}

  std::vector<std::complex<double>> z_;
  int bandwidth_ = 0;
  std::uint64_t truncations_ = 0;
};

/// Alias matching the operation name used by the estimators.
FourierPosterior init_flat(int n_freq);

/// Copy of `post` updated with one outcome.
FourierPosterior update_single(FourierPosterior post, int k, double beta, int m,
                               const NoiseModel& noise = NoiseModel::none());

/// Integral of P(phi) prod_r P(m_r | phi) over the circle; rounds and
/// outcomes are aligned, noise is applied per round.
double q_integral(const FourierPosterior& post, std::span<const RoundSpec> rounds,
                  std::span<const int> outcomes, const NoiseModel& noise = NoiseModel::none());

/// Sparse operators on the real layout: M0(k) multiplies by 2 cos(k phi),
/// M1(k) by -2 sin(k phi); harmonics beyond n_freq - 1 are dropped. An
/// update is p -> p/2 + c cos(gamma) M0 p / 4 + c sin(gamma) M1 p / 4 with
/// gamma = beta + m pi and c the depolarizing fidelity.
struct MMatrices {
  Eigen::SparseMatrix<double> m0;
  Eigen::SparseMatrix<double> m1;
};
MMatrices m_matrices(int k, int n_freq);

/// CSV (index,coefficient) in the real layout.
void write_posterior_csv(std::ostream& out, const FourierPosterior& post);
/// CSV (phase,density) on a uniform grid.
void write_density_csv(std::ostream& out, const FourierPosterior& post, int points);

}  // namespace qpe
