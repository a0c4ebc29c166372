#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpe/phase.hpp"
#include "qpe/signal.hpp"

namespace qpe {

/// symmetric:     k in [-K, K] through g(-k) = conj g(k); noiseless data.
/// positive_only: k in [0, K]; eigenvalues may shrink inside the unit
///                circle, which is how depolarizing decay is absorbed.
enum class PronyMode { symmetric, positive_only };

const char* to_string(PronyMode mode);
PronyMode prony_mode_from_string(const std::string& name);

/// G0[i][j] = g(i + j + offset), G1[i][j] = g(i + j + 1 + offset), each
/// l x (span - l), with offset = -K (symmetric) or 0 (positive_only).
/// sigma1 holds the standard deviation of every G1 entry.
struct HankelPair {
  Eigen::MatrixXcd G0;
  Eigen::MatrixXcd G1;
  Eigen::MatrixXd sigma1;
  int offset = 0;
};

/// Throws std::invalid_argument unless 1 <= l <= K.
HankelPair build_hankel(const SignalEstimate& signal, int l, PronyMode mode);

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankThreshold = 1e-10;

/// Least-squares shift operator T with T G0 ~ G1, minimum-norm when G0 is
/// rank deficient. With `weighted`, row i minimizes
/// || (T_i G0 - G1_i) diag(1 / sigma1_i) ||. Zero sigmas are floored at the
/// smallest positive sigma of the pair (uniform weights if all are zero).
/// Throws std::invalid_argument when G0 vanishes.
Eigen::MatrixXcd solve_shift(const HankelPair& pair, bool weighted = false);

struct EigenPhase {
  Phase phase;
  double modulus = 1.0;
};

/// Eigenvalues of the shift operator as (wrapped argument, modulus).
/// Throws std::runtime_error if the eigensolver does not converge.
std::vector<EigenPhase> eigenphases(const Eigen::MatrixXcd& shift);

/// Real A minimizing || B A - g ||_2^2 + ridge |A|^2 over k = 0..K with
/// B_{k,j} = r_j^k e^{i k phi_j}; r_j = min(modulus_j, 1) in positive_only
/// mode, 1 otherwise. Real and imaginary parts are stacked so A stays real.
std::vector<double> recover_amplitudes(const std::vector<EigenPhase>& eig,
                                       const SignalEstimate& signal,
                                       PronyMode mode = PronyMode::symmetric, double ridge = 0.0);

/// Common decay r for positive_only amplitude fits: the eigenvalue modulus
/// (capped at 1) that, used for every column, leaves the smallest fit
/// residual. Exact for noiseless damped signals, where the true decay is
/// one of the candidates.
double shared_decay(const std::vector<EigenPhase>& eig, const SignalEstimate& signal,
                    double ridge = 0.0);

/// Ridge used by `estimate`: the mean per-component variance of g, i.e. a
/// unit-width Gaussian prior on each amplitude. Zero for exact signals.
double amplitude_ridge(const SignalEstimate& signal);

struct PronyOptions {
  std::optional<int> l;  // defaults: K (symmetric), floor((K + 1) / 2) (positive_only)
  PronyMode mode = PronyMode::symmetric;
  bool weighted = false;
};

struct PronyComponent {
  Phase phase;
  double amplitude = 0.0;  // raw least-squares value, may be slightly negative
  double modulus = 1.0;
};

struct PronyEstimate {
  PronyMode mode = PronyMode::symmetric;
  int l = 0;
  std::vector<PronyComponent> components;  // descending amplitude

  /// Amplitudes clipped at zero and renormalized to sum to one (uniform if
  /// nothing positive survives).
  std::vector<double> clipped_amplitudes() const;
};

int default_l(int K, PronyMode mode);

PronyEstimate estimate(const SignalEstimate& signal, const PronyOptions& options = {});

enum class TargetPolicy { max_amplitude, nearest_reference };

/// max_amplitude: largest raw amplitude. nearest_reference: smallest
/// circular distance to `reference`. Ties go to the smaller phase value.
Phase select_target(const PronyEstimate& est, TargetPolicy policy,
                    std::optional<Phase> reference = std::nullopt);

/// Error propagation for one frequency at the signal endpoint:
/// [sin^2(K phi) var_re + cos^2(K phi) var_im] / K^2.
double predicted_single_freq_variance(int K, double phase, double var_re, double var_im);

/// Same with var_re = var_im = 1/N. The weighted (multi-round) variant
/// scales as 1/(K N) instead of 1/(K^2 N).
double predicted_single_freq_variance(int K, double N, double phase, bool weighted);

/// CSV columns phase,amplitude,modulus; mode and l go in a header comment.
void write_prony_csv(std::ostream& out, const PronyEstimate& est);

}  // namespace qpe
