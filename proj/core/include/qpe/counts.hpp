#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <utility>

namespace qpe {

enum class CountsMode { single_round, multi_round };

/// Outcome tallies of a QPE campaign.
///
/// single_round: keyed by (k, beta, m); shots are tracked per (k, beta).
/// multi_round:  keyed by the Hamming pair (hw0, hw1) of the K-round k = 1
///               design; every key shares the same shot total.
///
/// Tallies form a commutative monoid under `+=`, so per-worker counts can
/// be merged in any order.
class AggregatedCounts {
public:
  using SingleKey = std::tuple<int, double, int>;  // (k, beta, m)
  using MultiKey = std::pair<int, int>;            // (hw0, hw1)

  static AggregatedCounts single_round() { return AggregatedCounts(CountsMode::single_round, 0); }
  /// Throws std::invalid_argument unless total_k is even and positive.
  static AggregatedCounts multi_round(int total_k);

  CountsMode mode() const { return mode_; }
  /// K of the multi-round design (0 in single-round mode).
  int design_k() const { return design_k_; }

  void add_single(int k, double beta, int m, std::uint64_t count);
  void add_multi(int hw0, int hw1, std::uint64_t count);

  std::uint64_t single_count(int k, double beta, int m) const;
  /// Shots recorded at (k, beta).
  std::uint64_t shots(int k, double beta) const;
  std::uint64_t multi_count(int hw0, int hw1) const;
  /// Total number of multi-round experiments.
  std::uint64_t multi_shots() const { return multi_shots_; }

  const std::map<SingleKey, std::uint64_t>& single_tallies() const { return single_; }
  const std::map<MultiKey, std::uint64_t>& multi_tallies() const { return multi_; }

  /// Largest k with any single-round data.
  int max_k() const;
  /// Number of experiments recorded.
  std::uint64_t experiments() const;
  /// K_tot: controlled-U applications summed over every experiment.
  std::uint64_t total_applications() const;

  bool empty() const { return single_.empty() && multi_.empty(); }

  /// Merge; throws std::invalid_argument when modes or K differ.
  AggregatedCounts& operator+=(const AggregatedCounts& other);

  friend bool operator==(const AggregatedCounts&, const AggregatedCounts&) = default;

private:
  AggregatedCounts(CountsMode mode, int design_k) : mode_(mode), design_k_(design_k) {}

  CountsMode mode_ = CountsMode::single_round;
  int design_k_ = 0;
  std::map<SingleKey, std::uint64_t> single_;
  std::map<std::pair<int, double>, std::uint64_t> single_shots_;
  std::map<MultiKey, std::uint64_t> multi_;
  std::uint64_t multi_shots_ = 0;
};

/// CSV with a header row; single_round columns (k,beta,m,count,shots),
/// multi_round columns (K,hw0,hw1,count,shots). '#' lines are comments.
void write_counts_csv(std::ostream& out, const AggregatedCounts& counts);
AggregatedCounts read_counts_csv(std::istream& in);

}  // namespace qpe
