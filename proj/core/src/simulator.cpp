#include "qpe/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "math_util.hpp"

namespace qpe {

namespace {

constexpr double kBetaTolerance = 1e-12;

bool same_beta(double a, double b) { return std::abs(a - b) <= kBetaTolerance; }

// Per-eigenphase probability of m = 1 for a k = 1 round at the given beta.
double prob_one(double phase, double beta, const NoiseModel& noise) {
  const double p = round_likelihood(phase, 1, beta, 1);
  return noise.is_noisy() ? apply_depolarizing(p, 1, noise.k_err) : p;
}

std::uint64_t draw_binomial(std::uint64_t n, double p, Rng& rng) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::uint64_t> dist(n, p);
  return dist(rng);
}

}  // namespace

ExperimentSpec::ExperimentSpec(std::vector<RoundSpec> rounds) : rounds_(std::move(rounds)) {
  if (rounds_.empty()) throw std::invalid_argument("ExperimentSpec: no rounds");
  for (const auto& r : rounds_) {
    if (r.k < 1) throw std::invalid_argument("ExperimentSpec: k must be >= 1");
    if (!std::isfinite(r.beta)) throw std::invalid_argument("ExperimentSpec: non-finite beta");
    total_k_ += r.k;
  }
}

bool ExperimentSpec::is_hamming_design() const {
  if (rounds_.size() < 2 || rounds_.size() % 2 != 0) return false;
  std::size_t zeros = 0;
  std::size_t quarters = 0;
  for (const auto& r : rounds_) {
    if (r.k != 1) return false;
    if (same_beta(r.beta, 0.0)) {
      ++zeros;
    } else if (same_beta(r.beta, kPi / 2)) {
      ++quarters;
    } else {
      return false;
    }
  }
  return zeros == quarters;
}

NoiseModel NoiseModel::depolarizing(double k_err) {
  if (!(k_err > 0.0)) throw std::invalid_argument("depolarizing noise needs k_err > 0");
  return {Kind::depolarizing, k_err};
}

double NoiseModel::fidelity(int k) const {
  return is_noisy() ? std::exp(-static_cast<double>(k) / k_err) : 1.0;
}

double apply_depolarizing(double p, int k, double k_err) {
  const double f = std::exp(-static_cast<double>(k) / k_err);
  return p * f + 0.5 * (1.0 - f);
}

double round_likelihood(double phase, int k, double beta, int m) {
  const double c = std::cos(0.5 * k * phase + 0.5 * (beta - m * kPi));
  return c * c;
}

double round_outcome_prob(const Spectrum& spectrum, int k, double beta, int m,
                          const NoiseModel& noise) {
  if (k < 1) throw std::invalid_argument("round_outcome_prob: k must be >= 1");
  double p = 0.0;
  for (const auto& line : spectrum.lines()) {
    p += line.weight * round_likelihood(line.phase.radians(), k, beta, m);
  }
  return noise.is_noisy() ? apply_depolarizing(p, k, noise.k_err) : p;
}

double experiment_outcome_prob(const Spectrum& spectrum, const ExperimentSpec& spec,
                               std::span<const int> outcomes, const NoiseModel& noise) {
  if (outcomes.size() != spec.size()) {
    throw std::invalid_argument("experiment_outcome_prob: outcome string length mismatch");
  }
  double total = 0.0;
  for (const auto& line : spectrum.lines()) {
    double product = 1.0;
    for (std::size_t r = 0; r < spec.size(); ++r) {
      const auto& round = spec.rounds()[r];
      double p = round_likelihood(line.phase.radians(), round.k, round.beta, outcomes[r]);
      if (noise.is_noisy()) p = apply_depolarizing(p, round.k, noise.k_err);
      product *= p;
    }
    total += line.weight * product;
  }
  return total;
}

std::vector<double> hamming_distribution(const Spectrum& spectrum, int total_k,
                                         const NoiseModel& noise) {
  if (total_k <= 0 || total_k % 2 != 0) {
    throw std::invalid_argument("hamming_distribution: K must be even and positive");
  }
  const int half = total_k / 2;
  const int side = half + 1;
  std::vector<double> table(static_cast<std::size_t>(side * side), 0.0);
  std::vector<double> pmf0(side);
  std::vector<double> pmf1(side);
  for (const auto& line : spectrum.lines()) {
    const double phi = line.phase.radians();
    const double q0 = prob_one(phi, 0.0, noise);
    const double q1 = prob_one(phi, kPi / 2, noise);
    for (int x = 0; x <= half; ++x) {
      pmf0[x] = detail::binomial_pmf(half, x, q0);
      pmf1[x] = detail::binomial_pmf(half, x, q1);
    }
    for (int a = 0; a <= half; ++a) {
      for (int b = 0; b <= half; ++b) {
        table[static_cast<std::size_t>(a * side + b)] += line.weight * pmf0[a] * pmf1[b];
      }
    }
  }
  return table;
}

double hamming_prob(const Spectrum& spectrum, int total_k, int hw0, int hw1,
                    const NoiseModel& noise) {
  if (total_k <= 0 || total_k % 2 != 0) {
    throw std::invalid_argument("hamming_prob: K must be even and positive");
  }
  const int half = total_k / 2;
  if (hw0 < 0 || hw1 < 0 || hw0 > half || hw1 > half) {
    throw std::invalid_argument("hamming_prob: Hamming weight out of range");
  }
  double p = 0.0;
  for (const auto& line : spectrum.lines()) {
    const double phi = line.phase.radians();
    p += line.weight * detail::binomial_pmf(half, hw0, prob_one(phi, 0.0, noise)) *
         detail::binomial_pmf(half, hw1, prob_one(phi, kPi / 2, noise));
  }
  return p;
}

std::vector<int> sample_experiment(const Spectrum& spectrum, const ExperimentSpec& spec,
                                   const NoiseModel& noise, Rng& rng) {
  // The starting state acts as a classical mixture over eigenstates.
  double u = uniform01(rng);
  std::size_t j = 0;
  for (; j + 1 < spectrum.size(); ++j) {
    u -= spectrum[j].weight;
    if (u < 0.0) break;
  }
  const double phi = spectrum[j].phase.radians();
  std::vector<int> outcome;
  outcome.reserve(spec.size());
  for (const auto& round : spec.rounds()) {
    double p0 = round_likelihood(phi, round.k, round.beta, 0);
    if (noise.is_noisy()) p0 = apply_depolarizing(p0, round.k, noise.k_err);
    outcome.push_back(uniform01(rng) < p0 ? 0 : 1);
  }
  return outcome;
}

AggregatedCounts sample_schedule(const Spectrum& spectrum, const Schedule& schedule,
                                 const NoiseModel& noise, Rng& rng) {
  if (schedule.empty()) throw std::invalid_argument("run_schedule: empty schedule");
  const bool single = schedule.front().spec.is_single_round();
  const int design_k = schedule.front().spec.total_k();
  for (const auto& entry : schedule) {
    if (entry.spec.is_single_round() != single) {
      throw std::invalid_argument("run_schedule: mixed single- and multi-round experiments");
    }
    if (!single && (!entry.spec.is_hamming_design() || entry.spec.total_k() != design_k)) {
      throw std::invalid_argument(
          "run_schedule: multi-round experiments must all use the same K-round k=1 design");
    }
  }

  if (single) {
    auto counts = AggregatedCounts::single_round();
    for (const auto& entry : schedule) {
      if (entry.repetitions == 0) continue;
      const auto& round = entry.spec.rounds().front();
      const double p0 = round_outcome_prob(spectrum, round.k, round.beta, 0, noise);
      const std::uint64_t zeros = draw_binomial(entry.repetitions, p0, rng);
      counts.add_single(round.k, round.beta, 0, zeros);
      counts.add_single(round.k, round.beta, 1, entry.repetitions - zeros);
    }
    return counts;
  }

  auto counts = AggregatedCounts::multi_round(design_k);
  const auto table = hamming_distribution(spectrum, design_k, noise);
  const int side = design_k / 2 + 1;
  for (const auto& entry : schedule) {
    // Multinomial draw as a chain of conditional binomials.
    std::uint64_t remaining = entry.repetitions;
    double mass = 1.0;
    for (std::size_t cell = 0; cell < table.size() && remaining > 0; ++cell) {
      const double p = mass > 0.0 ? std::clamp(table[cell] / mass, 0.0, 1.0) : 1.0;
      const bool last = cell + 1 == table.size();
      const std::uint64_t c = last ? remaining : draw_binomial(remaining, p, rng);
      if (c > 0) counts.add_multi(static_cast<int>(cell) / side, static_cast<int>(cell) % side, c);
      remaining -= c;
      mass -= table[cell];
    }
  }
  return counts;
}

AggregatedCounts run_schedule(const Spectrum& spectrum, const Schedule& schedule,
                              const NoiseModel& noise, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_schedule(spectrum, schedule, noise, rng);
}

}  // namespace qpe
