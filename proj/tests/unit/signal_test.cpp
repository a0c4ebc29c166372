#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "qpe/chi.hpp"
#include "qpe/design.hpp"
#include "qpe/signal.hpp"
#include "qpe/statistics.hpp"

namespace qpe {
namespace {

using cd = std::complex<double>;

Spectrum random_spectrum(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<SpectralLine> lines;
  for (int j = 0; j < n; ++j) lines.push_back({Phase(phase(rng)), weight(rng)});
  return Spectrum::normalized(std::move(lines));
}

cd direct_g(const Spectrum& s, int k) {
  cd g = 0.0;
  for (const auto& line : s.lines()) g += line.weight * std::polar(1.0, k * line.phase.radians());
  return g;
}

// Enumerates the strings independently of the library: the product over the
// first k rounds of [(-1)^m_i - i (-1)^n_i], averaged over every pair of
// weight-hw0 and weight-hw1 strings of length K/2.
cd enumerate_chi(int k, int hw0, int hw1, int K) {
  const int h = K / 2;
  cd sum = 0.0;
  long count = 0;
  for (int m = 0; m < (1 << h); ++m) {
    if (__builtin_popcount(static_cast<unsigned>(m)) != hw0) continue;
    for (int n = 0; n < (1 << h); ++n) {
      if (__builtin_popcount(static_cast<unsigned>(n)) != hw1) continue;
      cd prod = 1.0;
      for (int i = 0; i < k; ++i) {
        const double a = (m >> i) & 1 ? -1.0 : 1.0;
        const double b = (n >> i) & 1 ? -1.0 : 1.0;
        prod *= cd(a, -b);
      }
      sum += prod;
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

TEST(GFromSingleRound, ExactProbabilities) {
  const auto g = g_from_single_round_exact(Spectrum::single(kPi / 2), 3);
  EXPECT_NEAR(std::abs(g[1] - cd(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_EQ(g[0], cd(1.0, 0.0));
}

TEST(GFromSingleRound, FrequencyFormula) {
  EXPECT_NEAR(std::abs(single_round_signal_value(1.0, 0.5) - cd(1.0, 0.0)), 0.0, 1e-15);
  const double p0 = 0.3, p1 = 0.8;
  const cd oracle = cd(p0 - (1 - p0), 0.0) + cd(0.0, -p1 + (1 - p1));
  EXPECT_NEAR(std::abs(single_round_signal_value(p0, p1) - oracle), 0.0, 1e-15);
}

TEST(GFromSingleRound, ExactReconstructionProperty) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_spectrum(rng, 1 + t % 6);
    const auto g = g_from_single_round_exact(s, 12);
    for (int k = 0; k <= 12; ++k) EXPECT_NEAR(std::abs(g[k] - direct_g(s, k)), 0.0, 1e-14);
  }
}

TEST(GFromSingleRound, SampledMatchesExact) {
  const auto s = Spectrum::normalized({{Phase(0.7), 0.6}, {Phase(-1.1), 0.4}});
  const int K = 10;
  const auto counts = run_schedule(s, ts_single_round_schedule(K, 2000000ull * K), NoiseModel::none(), 77);
  const auto g = g_from_single_round(counts);
  ASSERT_EQ(g.K, K);
  for (int k = 0; k <= K; ++k) {
    EXPECT_LT(std::abs(g[k] - direct_g(s, k)), 5e-3) << "k=" << k;
    EXPECT_LE(std::abs(g[k]), 1.0 + 3.0 * g.sigma[static_cast<std::size_t>(k)] + 1e-12);
  }
}

TEST(GFromSingleRound, MissingCellThrows) {
  auto counts = AggregatedCounts::single_round();
  counts.add_single(1, 0.0, 0, 10);
  counts.add_single(1, kPi / 2, 0, 10);
  counts.add_single(2, 0.0, 0, 10);
  EXPECT_THROW(g_from_single_round(counts), std::invalid_argument);
}

TEST(GFromSingleRound, ErrorShrinksAsInverseRootN) {
  const auto s = Spectrum::normalized({{Phase(0.7), 0.6}, {Phase(-1.1), 0.4}});
  const int K = 4;
  std::vector<double> ns, errs;
  for (double n : {1e3, 1e4, 1e5, 1e6}) {
    double err = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
      const auto counts = run_schedule(s, ts_single_round_schedule(K, static_cast<std::uint64_t>(n) * 2 * K),
                                       NoiseModel::none(), 1000 + r);
      const auto g = g_from_single_round(counts);
      for (int k = 1; k <= K; ++k) err += std::abs(g[k] - direct_g(s, k));
    }
    ns.push_back(n);
    errs.push_back(err / reps / K);
  }
  EXPECT_NEAR(fit_loglog(ns, errs).slope, -0.5, 0.1);
}

TEST(Chi, OracleExamples) {
  for (int K : {2, 4, 8}) {
    for (int a = 0; a <= K / 2; ++a) {
      for (int b = 0; b <= K / 2; ++b) EXPECT_EQ(chi_oracle(0, a, b, K), cd(1.0, 0.0));
    }
  }
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b) {
      const cd expected(a ? -1.0 : 1.0, b ? 1.0 : -1.0);
      EXPECT_NEAR(std::abs(chi_oracle(1, a, b, 2) - expected), 0.0, 1e-15);
      EXPECT_NEAR(std::abs(chi_closed_form(1, a, b, 2) - expected), 0.0, 1e-15);
    }
  }
  EXPECT_NEAR(std::abs(chi_oracle(2, 1, 0, 4) - enumerate_chi(2, 1, 0, 4)), 0.0, 1e-15);
}

TEST(Chi, OracleMatchesIndependentEnumeration) {
  for (int K : {2, 4, 6, 8, 10}) {
    for (int k = 0; k <= K / 2; ++k) {
      for (int a = 0; a <= K / 2; ++a) {
        for (int b = 0; b <= K / 2; ++b) {
          EXPECT_NEAR(std::abs(chi_oracle(k, a, b, K) - enumerate_chi(k, a, b, K)), 0.0, 1e-13);
        }
      }
    }
  }
}

TEST(Chi, ClosedFormMatchesOracleExhaustively) {
  for (int K : {2, 4, 6, 8}) {
    for (int k = 0; k <= K / 2; ++k) {
      for (int a = 0; a <= K / 2; ++a) {
        for (int b = 0; b <= K / 2; ++b) {
          EXPECT_NEAR(std::abs(chi_closed_form(k, a, b, K) - chi_oracle(k, a, b, K)), 0.0, 1e-12)
              << "K=" << K << " k=" << k << " hw=(" << a << "," << b << ")";
        }
      }
    }
  }
}

TEST(Chi, ClosedFormAgreesForLargerK) {
  for (int K : {12, 16}) {
    for (int k : {1, 3, K / 2}) {
      for (int a : {0, 2, K / 2}) {
        for (int b : {1, K / 4}) {
          EXPECT_NEAR(std::abs(chi_closed_form(k, a, b, K) - chi_oracle(k, a, b, K)), 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(Chi, OracleRejectsBadArguments) {
  EXPECT_THROW(chi_oracle(1, 3, 0, 4), std::invalid_argument);
  EXPECT_THROW(chi_oracle(3, 0, 0, 4), std::invalid_argument);
  EXPECT_THROW(chi_oracle(1, 0, 0, 5), std::invalid_argument);
}

TEST(ChiTable, ZeroRowIsOneAndCacheIsShared) {
  const auto table = ChiTable::shared(12);
  EXPECT_EQ(table.get(), ChiTable::shared(12).get());
  for (int a = 0; a <= 6; ++a) {
    for (int b = 0; b <= 6; ++b) EXPECT_NEAR(std::abs((*table)(0, a, b) - cd(1.0, 0.0)), 0.0, 1e-15);
  }
  EXPECT_THROW(ChiTable(7), std::invalid_argument);
}

TEST(ChiTable, SaveLoadRoundTrip) {
  const ChiTable table(10);
  const std::string path = ::testing::TempDir() + "chi10.bin";
  table.save(path);
  const auto back = ChiTable::load(path, 10);
  for (int k = 0; k <= 5; ++k) {
    for (int a = 0; a <= 5; ++a) {
      for (int b = 0; b <= 5; ++b) EXPECT_EQ(back(k, a, b), table(k, a, b));
    }
  }
  EXPECT_THROW(ChiTable::load(path, 12), std::runtime_error);
}

TEST(GFromMultiRound, ExactDistributions) {
  for (int K : {2, 4, 8}) {
    const auto g = g_from_hamming_distribution(K, hamming_distribution(Spectrum::single(0.0), K));
    for (int k = 0; k <= K / 2; ++k) EXPECT_NEAR(std::abs(g[k] - cd(1.0, 0.0)), 0.0, 1e-12);
  }
  const auto one = Spectrum::single(0.7);
  const auto g1 = g_from_hamming_distribution(8, hamming_distribution(one, 8));
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(std::abs(g1[k] - std::polar(1.0, 0.7 * k)), 0.0, 1e-10);

  const auto two = Spectrum({{Phase(0.7), 0.6}, {Phase(-1.1), 0.4}});
  const auto g2 = g_from_hamming_distribution(8, hamming_distribution(two, 8));
  for (int k = 0; k <= 4; ++k) {
    const cd oracle = 0.6 * std::polar(1.0, 0.7 * k) + 0.4 * std::polar(1.0, -1.1 * k);
    EXPECT_NEAR(std::abs(g2[k] - oracle), 0.0, 1e-10);
  }
}

TEST(GFromMultiRound, ConsistencyForRandomSpectra) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 40; ++t) {
    const auto s = random_spectrum(rng, 1 + t % 4);
    for (int K : {2, 4, 6, 8}) {
      const auto g = g_from_hamming_distribution(K, hamming_distribution(s, K));
      for (int k = 0; k <= K / 2; ++k) EXPECT_NEAR(std::abs(g[k] - direct_g(s, k)), 0.0, 1e-10);
    }
  }
}

TEST(GFromMultiRound, SampledWithinSigma) {
  const auto s = Spectrum({{Phase(0.7), 0.6}, {Phase(-1.1), 0.4}});
  const int K = 8;
  const auto counts = run_schedule(s, ts_multi_round_campaign(K, 400000), NoiseModel::none(), 8);
  const auto g = g_from_multi_round(counts);
  ASSERT_EQ(g.K, K / 2);
  EXPECT_EQ(g[0], cd(1.0, 0.0));
  for (int k = 1; k <= K / 2; ++k) {
    EXPECT_LT(std::abs(g[k] - direct_g(s, k)), 5.0 * g.sigma[static_cast<std::size_t>(k)]);
  }
  EXPECT_THROW(g_from_multi_round(AggregatedCounts::single_round()), std::invalid_argument);
}

TEST(ExtendNegative, Examples) {
  SignalEstimate s;
  s.K = 2;
  s.g = {1.0, cd(0.0, 1.0), cd(0.3, -0.2)};
  s.sigma = {0.0, 0.1, 0.2};
  const auto e = extend_negative(s);
  EXPECT_EQ(e.at(-1), cd(0.0, -1.0));
  EXPECT_EQ(e.at(0), cd(1.0, 0.0));
  EXPECT_EQ(e.at(-2), std::conj(s[2]));
  EXPECT_EQ(e.sigma_at(-2), 0.2);
  const auto back = restrict_nonnegative(e);
  EXPECT_EQ(back.g, s.g);
  EXPECT_EQ(back.sigma, s.sigma);
}

TEST(SignalEstimate, CsvRoundTrip) {
  const auto s = g_from_single_round_exact(Spectrum({{Phase(0.7), 0.6}, {Phase(-1.1), 0.4}}), 6);
  std::stringstream buffer;
  write_signal_csv(buffer, s);
  const auto back = read_signal_csv(buffer);
  EXPECT_EQ(back.K, s.K);
  EXPECT_EQ(back.g, s.g);
}

}  // namespace
}  // namespace qpe
