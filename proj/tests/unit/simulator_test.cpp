#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "qpe/design.hpp"
#include "qpe/simulator.hpp"

namespace qpe {
namespace {

// cos^2(k phi / 2 + (beta - m pi) / 2) written out independently.
double likelihood(double phi, int k, double beta, int m) {
  const double c = std::cos(0.5 * k * phi + 0.5 * (beta - m * kPi));
  return c * c;
}

Spectrum random_spectrum(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<SpectralLine> lines;
  for (int j = 0; j < n; ++j) lines.push_back({Phase(phase(rng)), weight(rng)});
  return Spectrum::normalized(std::move(lines));
}

// Every bit-string of the given length.
std::vector<std::vector<int>> all_strings(int length) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << length); ++mask) {
    std::vector<int> m(static_cast<std::size_t>(length));
    for (int r = 0; r < length; ++r) m[static_cast<std::size_t>(r)] = (mask >> r) & 1;
    out.push_back(std::move(m));
  }
  return out;
}

TEST(RoundOutcomeProb, Examples) {
  EXPECT_NEAR(round_outcome_prob(Spectrum::single(0.0), 1, 0.0, 0), 1.0, 1e-15);
  EXPECT_NEAR(round_outcome_prob(Spectrum::single(kPi), 1, 0.0, 0), 0.0, 1e-15);
  const Spectrum half({{Phase(0.0), 0.5}, {Phase(kPi), 0.5}});
  EXPECT_NEAR(round_outcome_prob(half, 1, 0.0, 0), 0.5, 1e-15);
}

TEST(RoundOutcomeProb, OutcomesSumToOne) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> beta(0.0, kTwoPi);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_spectrum(rng, 1 + t % 5);
    const int k = 1 + t % 13;
    const double b = beta(rng);
    const double p0 = round_outcome_prob(s, k, b, 0);
    EXPECT_GE(p0, 0.0);
    EXPECT_LE(p0, 1.0);
    EXPECT_NEAR(p0 + round_outcome_prob(s, k, b, 1), 1.0, 1e-14);
  }
}

TEST(ExperimentOutcomeProb, Examples) {
  const ExperimentSpec one = ExperimentSpec::single(3, 0.4);
  const auto s = Spectrum::normalized({{Phase(0.2), 1.0}, {Phase(2.0), 1.0}});
  const std::vector<int> m0{0};
  EXPECT_NEAR(experiment_outcome_prob(s, one, m0), round_outcome_prob(s, 3, 0.4, 0), 1e-15);

  const ExperimentSpec two({{1, 0.0}, {1, 0.0}});
  const std::vector<int> zeros{0, 0};
  EXPECT_NEAR(experiment_outcome_prob(Spectrum::single(0.0), two, zeros), 1.0, 1e-15);

  const ExperimentSpec mixed({{1, 0.0}, {1, kPi / 2}});
  const std::vector<int> m01{0, 1};
  const double oracle = likelihood(kPi / 2, 1, 0.0, 0) * likelihood(kPi / 2, 1, kPi / 2, 1);
  EXPECT_NEAR(experiment_outcome_prob(Spectrum::single(kPi / 2), mixed, m01), oracle, 1e-15);
  EXPECT_NEAR(oracle, 0.5, 1e-15);
}

TEST(ExperimentOutcomeProb, LengthMismatchThrows) {
  const std::vector<int> m{0};
  EXPECT_THROW(experiment_outcome_prob(Spectrum::single(0.0), ExperimentSpec({{1, 0.0}, {1, 0.0}}), m),
               std::invalid_argument);
}

TEST(ExperimentOutcomeProb, SumsToOneAndPermutationInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> kd(1, 3);
  std::uniform_real_distribution<double> bd(0.0, kTwoPi);
  for (int t = 0; t < 30; ++t) {
    const auto s = random_spectrum(rng, 1 + t % 4);
    std::vector<RoundSpec> rounds;
    int total = 0;
    while (true) {
      const int k = kd(rng);
      if (total + k > 8) break;
      rounds.push_back({k, bd(rng)});
      total += k;
    }
    const ExperimentSpec spec(rounds);
    auto reversed_rounds = rounds;
    std::reverse(reversed_rounds.begin(), reversed_rounds.end());
    const ExperimentSpec reversed(reversed_rounds);
    double sum = 0.0;
    for (const auto& m : all_strings(static_cast<int>(rounds.size()))) {
      const double p = experiment_outcome_prob(s, spec, m);
      sum += p;
      auto mr = m;
      std::reverse(mr.begin(), mr.end());
      EXPECT_NEAR(p, experiment_outcome_prob(s, reversed, mr), 1e-14);
      NoiseModel noise = NoiseModel::depolarizing(3.0);
      double mix = 0.0;
      for (const auto& line : s.lines()) {
        mix += line.weight * experiment_outcome_prob(Spectrum::single(line.phase.radians()), spec, m, noise);
      }
      EXPECT_NEAR(experiment_outcome_prob(s, spec, m, noise), mix, 1e-14);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(HammingProb, Examples) {
  EXPECT_NEAR(hamming_prob(Spectrum::single(0.0), 2, 0, 0), 0.5, 1e-15);
  EXPECT_NEAR(hamming_prob(Spectrum::single(0.0), 2, 1, 0), 0.0, 1e-15);
  EXPECT_NEAR(hamming_prob(Spectrum::single(kPi / 2), 2, 0, 0), 0.0, 1e-15);
  EXPECT_THROW(hamming_prob(Spectrum::single(0.0), 3, 0, 0), std::invalid_argument);
}

TEST(HammingProb, MatchesBruteForceOverStrings) {
  std::mt19937_64 rng(9);
  for (int K : {2, 4, 6, 8}) {
    for (int t = 0; t < 4; ++t) {
      const auto s = random_spectrum(rng, 1 + t);
      const NoiseModel noise = t % 2 ? NoiseModel::depolarizing(5.0) : NoiseModel::none();
      const auto spec = ts_multi_round_schedule(K);
      const int h = K / 2;
      std::vector<double> brute(static_cast<std::size_t>((h + 1) * (h + 1)), 0.0);
      for (const auto& m : all_strings(K)) {
        int hw0 = 0, hw1 = 0;
        for (int r = 0; r < K; ++r) (r < h ? hw0 : hw1) += m[static_cast<std::size_t>(r)];
        brute[static_cast<std::size_t>(hw0 * (h + 1) + hw1)] += experiment_outcome_prob(s, spec, m, noise);
      }
      const auto table = hamming_distribution(s, K, noise);
      double total = 0.0;
      for (int a = 0; a <= h; ++a) {
        for (int b = 0; b <= h; ++b) {
          const auto idx = static_cast<std::size_t>(a * (h + 1) + b);
          EXPECT_NEAR(hamming_prob(s, K, a, b, noise), brute[idx], 1e-13);
          EXPECT_NEAR(table[idx], brute[idx], 1e-13);
          total += table[idx];
        }
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(ApplyDepolarizing, Examples) {
  EXPECT_DOUBLE_EQ(apply_depolarizing(1.0, 0, 7.0), 1.0);
  EXPECT_DOUBLE_EQ(apply_depolarizing(0.5, 13, 2.0), 0.5);
  EXPECT_NEAR(apply_depolarizing(1.0, 100, 100.0), std::exp(-1.0) + (1.0 - std::exp(-1.0)) / 2, 1e-15);
  EXPECT_NEAR(apply_depolarizing(1.0, 100, 100.0), 0.68394, 1e-5);
}

TEST(ApplyDepolarizing, CommutesWithMixture) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_spectrum(rng, 4);
    const int k = 1 + t % 20;
    const double mixed = apply_depolarizing(round_outcome_prob(s, k, 0.3, 0), k, 10.0);
    double per_line = 0.0;
    for (const auto& line : s.lines()) {
      per_line += line.weight * apply_depolarizing(likelihood(line.phase.radians(), k, 0.3, 0), k, 10.0);
    }
    EXPECT_NEAR(mixed, per_line, 1e-14);
    EXPECT_NEAR(round_outcome_prob(s, k, 0.3, 0, NoiseModel::depolarizing(10.0)), per_line, 1e-14);
  }
}

TEST(SampleExperiment, DeterministicOutcomes) {
  Rng rng = make_rng(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_experiment(Spectrum::single(0.0), ExperimentSpec::single(1, 0.0), NoiseModel::none(), rng)[0], 0);
  }
}

TEST(SampleExperiment, EmpiricalFrequencies) {
  Rng rng = make_rng(2);
  const auto spec = ExperimentSpec::single(1, 0.0);
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) {
    zeros += sample_experiment(Spectrum::single(kPi / 2), spec, NoiseModel::none(), rng)[0] == 0;
  }
  EXPECT_NEAR(zeros / 1e5, 0.5, 0.005);

  zeros = 0;
  for (int i = 0; i < 100000; ++i) {
    zeros += sample_experiment(Spectrum::single(0.0), spec, NoiseModel::depolarizing(1e-9), rng)[0] == 0;
  }
  EXPECT_NEAR(zeros / 1e5, 0.5, 0.005);
}

TEST(SampleExperiment, SeedReproducible) {
  const auto s = Spectrum::normalized({{Phase(0.4), 1.0}, {Phase(-2.0), 1.0}});
  const auto spec = ts_multi_round_schedule(6);
  Rng a = make_rng(5, 3);
  Rng b = make_rng(5, 3);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(sample_experiment(s, spec, NoiseModel::none(), a), sample_experiment(s, spec, NoiseModel::none(), b));
  }
}

TEST(RunSchedule, ShotAccounting) {
  const auto s = Spectrum::single(0.3);
  EXPECT_TRUE(run_schedule(s, {{ExperimentSpec::single(2, 0.0), 0}}, NoiseModel::none(), 1).empty());
  const auto counts = run_schedule(s, {{ExperimentSpec::single(2, 0.0), 100}}, NoiseModel::none(), 1);
  EXPECT_EQ(counts.shots(2, 0.0), 100u);
  EXPECT_EQ(counts.single_count(2, 0.0, 0) + counts.single_count(2, 0.0, 1), 100u);
  EXPECT_EQ(counts.total_applications(), 200u);

  const auto sched = ts_single_round_schedule(5, 1000);
  const auto c2 = run_schedule(s, sched, NoiseModel::none(), 4);
  std::uint64_t ktot = 0;
  for (const auto& e : sched) ktot += e.repetitions * static_cast<std::uint64_t>(e.spec.total_k());
  EXPECT_EQ(c2.total_applications(), ktot);
  EXPECT_EQ(c2.experiments(), 1000u);
}

TEST(RunSchedule, RejectsMixedModes) {
  Schedule mixed{{ExperimentSpec::single(1, 0.0), 5}, {ts_multi_round_schedule(4), 5}};
  EXPECT_THROW(run_schedule(Spectrum::single(0.0), mixed, NoiseModel::none(), 1), std::invalid_argument);
}

double chi_squared_pvalue(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0.0;
  int dof = -1;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    stat += std::pow(observed[i] - expected[i], 2) / expected[i];
    ++dof;
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

TEST(RunSchedule, SingleRoundTalliesFollowExactProbabilities) {
  const auto s = Spectrum::normalized({{Phase(0.7), 0.6}, {Phase(-1.1), 0.4}});
  const NoiseModel noise = NoiseModel::depolarizing(20.0);
  const auto sched = ts_single_round_schedule(4, 1000000);
  const auto counts = run_schedule(s, sched, noise, 99);
  std::vector<double> observed, expected;
  for (const auto& entry : sched) {
    const auto& r = entry.spec.rounds()[0];
    for (int m : {0, 1}) {
      observed.push_back(static_cast<double>(counts.single_count(r.k, r.beta, m)));
      expected.push_back(entry.repetitions * round_outcome_prob(s, r.k, r.beta, m, noise));
    }
  }
  EXPECT_GT(chi_squared_pvalue(observed, expected), 1e-6);
}

TEST(RunSchedule, HammingTalliesFollowExactProbabilities) {
  const auto s = Spectrum::normalized({{Phase(0.7), 0.6}, {Phase(-1.1), 0.4}});
  const int K = 8;
  const auto counts = run_schedule(s, ts_multi_round_campaign(K, 1000000), NoiseModel::none(), 123);
  const auto table = hamming_distribution(s, K);
  std::vector<double> observed, expected;
  for (int a = 0; a <= K / 2; ++a) {
    for (int b = 0; b <= K / 2; ++b) {
      observed.push_back(static_cast<double>(counts.multi_count(a, b)));
      expected.push_back(1e6 * table[static_cast<std::size_t>(a * (K / 2 + 1) + b)]);
    }
  }
  EXPECT_GT(chi_squared_pvalue(observed, expected), 1e-6);
}

TEST(AggregatedCounts, MergeIsOrderIndependent) {
  const auto s = Spectrum::single(1.0);
  const auto sched = ts_single_round_schedule(3, 600);
  const auto a = run_schedule(s, sched, NoiseModel::none(), 1);
  const auto b = run_schedule(s, sched, NoiseModel::none(), 2);
  auto ab = a;
  ab += b;
  auto ba = b;
  ba += a;
  EXPECT_EQ(ab, ba);
  EXPECT_EQ(ab.experiments(), 1200u);
  auto multi = AggregatedCounts::multi_round(4);
  EXPECT_THROW(multi += a, std::invalid_argument);
}

TEST(AggregatedCounts, CsvRoundTrip) {
  const auto s = Spectrum::normalized({{Phase(0.2), 1.0}, {Phase(2.2), 1.0}});
  for (const auto& counts : {run_schedule(s, ts_single_round_schedule(4, 800), NoiseModel::none(), 3),
                             run_schedule(s, ts_multi_round_campaign(6, 500), NoiseModel::none(), 3)}) {
    std::stringstream buffer;
    write_counts_csv(buffer, counts);
    EXPECT_EQ(read_counts_csv(buffer), counts);
  }
}

}  // namespace
}  // namespace qpe
