#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace qpe {

/// Brute-force chi_k(hw0, hw1): the average of
///   prod_{i=1}^{k} [(-1)^{m_i} - i (-1)^{n_i}]
/// over every bit-string m of length K/2 with weight hw0 and every n with
/// weight hw1. Exponential cost; K must be even and at most 16.
std::complex<double> chi_oracle(int k, int hw0, int hw1, int total_k);

/// Closed form of the same coefficient,
///   chi_k = sum_l C(k, l) (-i)^{k-l} rho(l, hw0) rho(k - l, hw1),
///   rho(l, w) = 2 sum_p C(w, 2p) C(K/2 - w, l - 2p) / C(K/2, l) - 1,
/// evaluated in 50-digit arithmetic and rounded once. Any even K.
std::complex<double> chi_closed_form(int k, int hw0, int hw1, int total_k);

/// chi_k(hw0, hw1) for 0 <= k <= K/2 and 0 <= hw0, hw1 <= K/2.
class ChiTable {
public:
  /// Builds the table from the closed form. Throws for odd or non-positive K.
  explicit ChiTable(int total_k);

  /// Process-wide cache; tables are built once per K and shared read-only.
  static std::shared_ptr<const ChiTable> shared(int total_k);

  int total_k() const { return total_k_; }
  int half() const { return total_k_ / 2; }

  std::complex<double> operator()(int k, int hw0, int hw1) const {
    const int side = half() + 1;
    return values_[static_cast<std::size_t>((k * side + hw0) * side + hw1)];
  }

  /// Binary dump keyed by K; load throws std::runtime_error when the file
  /// is missing, truncated or was written for another K.
  void save(const std::string& path) const;
  static ChiTable load(const std::string& path, int total_k);

private:
  ChiTable(int total_k, std::vector<std::complex<double>> values)
      : total_k_(total_k), values_(std::move(values)) {}

  int total_k_;
  std::vector<std::complex<double>> values_;
};

}  // namespace qpe
