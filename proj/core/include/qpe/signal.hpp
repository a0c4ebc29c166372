#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "qpe/counts.hpp"
#include "qpe/simulator.hpp"
#include "qpe/spectrum.hpp"

namespace qpe {

/// Estimated g(k) = sum_j A_j e^{i k phi_j} for k = 0..K, with a joint
/// standard deviation of the real and imaginary parts per k.
struct SignalEstimate {
  int K = 0;
  std::vector<std::complex<double>> g;  // size K + 1
  std::vector<double> sigma;            // size K + 1, sigma[0] = 0

  std::complex<double> operator[](int k) const { return g[static_cast<std::size_t>(k)]; }
};

/// Conjugate-symmetric extension to k = -K..K using g(-k) = conj g(k).
struct SymmetricSignal {
  int K = 0;
  std::vector<std::complex<double>> g;  // g[k + K]
  std::vector<double> sigma;

  std::complex<double> at(int k) const { return g[static_cast<std::size_t>(k + K)]; }
  double sigma_at(int k) const { return sigma[static_cast<std::size_t>(k + K)]; }
};

SymmetricSignal extend_negative(const SignalEstimate& s);
/// Inverse of extend_negative (keeps k >= 0).
SignalEstimate restrict_nonnegative(const SymmetricSignal& s);

/// g(k) = P(0 | k, 0) - P(1 | k, 0) - i P(0 | k, pi/2) + i P(1 | k, pi/2)
/// written in terms of the two m = 0 probabilities.
std::complex<double> single_round_signal_value(double p0_beta0, double p0_beta_half_pi);

/// Single-round estimator from tallies. K is the largest k present; every
/// k = 1..K must have data at beta = 0 and at beta = pi/2, otherwise
/// std::invalid_argument. sigma^2 = Var Re + Var Im from binomial variances.
SignalEstimate g_from_single_round(const AggregatedCounts& counts);

/// Same formula fed with exact outcome probabilities (sigma = 0).
SignalEstimate g_from_single_round_exact(const Spectrum& spectrum, int K,
                                         const NoiseModel& noise = NoiseModel::none());

/// Multi-round estimator g(k) = sum chi_k(hw0, hw1) P(hw0, hw1), k = 0..K/2,
/// for the K-round k = 1 design. sigma^2 = sum |chi|^2 P(1 - P) / N.
SignalEstimate g_from_multi_round(const AggregatedCounts& counts);

/// Same with a full (K/2 + 1)^2 Hamming-pair distribution (row-major in hw0)
/// and no sampling error.
SignalEstimate g_from_hamming_distribution(int total_k, const std::vector<double>& table);

/// Exact g(k), k = 0..K, straight from the spectrum.
SignalEstimate exact_signal(const Spectrum& spectrum, int K);

/// CSV columns k,re_g,im_g,sigma.
void write_signal_csv(std::ostream& out, const SignalEstimate& s);
SignalEstimate read_signal_csv(std::istream& in);

}  // namespace qpe
