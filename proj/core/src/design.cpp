#include "qpe/design.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace qpe {

Schedule ts_single_round_schedule(int K, std::uint64_t N) {
  if (K < 1) throw std::invalid_argument("ts_single_round_schedule: K must be >= 1");
  const std::uint64_t cells = 2 * static_cast<std::uint64_t>(K);
  const std::uint64_t base = N / cells;
  const std::uint64_t extra = N % cells;
  Schedule schedule;
  schedule.reserve(cells);
  std::uint64_t index = 0;
  for (int k = 1; k <= K; ++k) {
    for (double beta : {0.0, kPi / 2}) {
      schedule.push_back({ExperimentSpec::single(k, beta), base + (index < extra ? 1 : 0)});
      ++index;
    }
  }
  return schedule;
}

ExperimentSpec ts_multi_round_schedule(int K) {
  if (K < 2 || K % 2 != 0) throw std::invalid_argument("ts_multi_round_schedule: K must be even");
  std::vector<RoundSpec> rounds;
  rounds.reserve(static_cast<std::size_t>(K));
  for (int r = 0; r < K / 2; ++r) rounds.push_back({1, 0.0});
  for (int r = 0; r < K / 2; ++r) rounds.push_back({1, kPi / 2});
  return ExperimentSpec(std::move(rounds));
}

Schedule ts_multi_round_campaign(int K, std::uint64_t N) {
  return {{ts_multi_round_schedule(K), N}};
}

int adaptive_k(double sigma, int cap) {
  if (cap < 1) throw std::invalid_argument("adaptive_k: cap must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) return 1;
  const double k = std::ceil(1.25 / sigma);
  return k >= cap ? cap : std::max(1, static_cast<int>(k));
}

AdaptiveDesign::AdaptiveDesign(int k_cap, bool random_k) : k_cap_(k_cap), random_k_(random_k) {
  if (k_cap < 1) throw std::invalid_argument("AdaptiveDesign: cap must be >= 1");
}

RoundSpec AdaptiveDesign::next(double sigma, Rng& rng) {
  const int K = adaptive_k(sigma, k_cap_);
  int k = 0;
  if (random_k_) {
    std::uniform_int_distribution<int> pick(1, K);
    k = pick(rng);
  } else {
    k = static_cast<int>(counter_ % static_cast<std::uint64_t>(K)) + 1;
  }
  const double beta = kTwoPi * uniform01(rng);
  ++counter_;
  total_k_ += static_cast<std::uint64_t>(k);
  return {k, beta};
}

void write_schedule_csv(std::ostream& out, const Schedule& schedule) {
  out << std::setprecision(17) << "experiment_id,round_id,k,beta,repetitions\n";
  for (std::size_t e = 0; e < schedule.size(); ++e) {
    const auto rounds = schedule[e].spec.rounds();
    for (std::size_t r = 0; r < rounds.size(); ++r) {
      out << e << ',' << r << ',' << rounds[r].k << ',' << rounds[r].beta << ','
          << schedule[e].repetitions << '\n';
    }
  }
}

}  // namespace qpe
