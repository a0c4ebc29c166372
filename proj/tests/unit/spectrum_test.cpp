#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "qpe/error_stats.hpp"
#include "qpe/phase.hpp"
#include "qpe/spectrum.hpp"

namespace qpe {
namespace {

TEST(WrapPhase, Examples) {
  EXPECT_EQ(wrap_phase(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_phase(kPi), -kPi);
  EXPECT_NEAR(wrap_phase(1.5 * kPi), -0.5 * kPi, 1e-15);
}

TEST(WrapPhase, RejectsNonFinite) {
  EXPECT_THROW(wrap_phase(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  EXPECT_THROW(wrap_phase(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST(WrapPhase, PeriodicAndIdempotent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    const double w = wrap_phase(x);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_EQ(wrap_phase(w), w);
    EXPECT_NEAR(std::remainder(wrap_phase(x + kTwoPi) - w, kTwoPi), 0.0, 1e-12);
  }
}

TEST(CircularDistance, Examples) {
  EXPECT_EQ(circular_distance(Phase(0.5), Phase(0.5)), 0.0);
  EXPECT_NEAR(circular_distance(Phase(-3.0), Phase(3.0)), kTwoPi - 6.0, 1e-14);
  EXPECT_NEAR(circular_distance(Phase(0.0), Phase(kPi / 2)), kPi / 2, 1e-15);
}

TEST(CircularDistance, MatchesArgOfPhasorRatio) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    const double oracle = std::abs(std::arg(std::polar(1.0, a) * std::polar(1.0, -b)));
    EXPECT_NEAR(circular_distance(Phase(a), Phase(b)), oracle, 1e-12);
    EXPECT_EQ(circular_distance(Phase(a), Phase(b)), circular_distance(Phase(b), Phase(a)));
  }
}

TEST(CircularDistance, TriangleInequality) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 2000; ++i) {
    const Phase a(u(rng)), b(u(rng)), c(u(rng));
    EXPECT_LE(circular_distance(a, c), circular_distance(a, b) + circular_distance(b, c) + 1e-12);
  }
}

TEST(ErrorStats, Examples) {
  const std::vector<Phase> zeros(3, Phase(0.0));
  const auto s0 = error_stats(Phase(0.0), zeros);
  EXPECT_EQ(s0.mean_abs, 0.0);
  EXPECT_EQ(s0.rms, 0.0);
  EXPECT_NEAR(s0.holevo_var, 0.0, 1e-15);

  const std::vector<Phase> opposite{Phase(kPi / 2), Phase(-kPi / 2)};
  const auto s1 = error_stats(Phase(0.0), opposite);
  EXPECT_NEAR(s1.mean_abs, kPi / 2, 1e-15);
  EXPECT_NEAR(s1.rms, kPi / 2, 1e-15);
  EXPECT_TRUE(std::isinf(s1.holevo_var));

  const std::vector<Phase> pair{Phase(0.1), Phase(-0.1)};
  const auto s2 = error_stats(Phase(0.0), pair);
  EXPECT_NEAR(s2.mean_abs, 0.1, 1e-15);
  const double c = std::cos(0.1);
  EXPECT_NEAR(s2.holevo_var, 1.0 / (c * c) - 1.0, 1e-12);
  EXPECT_NEAR(s2.holevo_var, 0.01007, 1e-5);
}

TEST(ErrorStats, RejectsEmpty) {
  EXPECT_THROW(error_stats(Phase(0.0), std::vector<Phase>{}), std::invalid_argument);
}

TEST(ErrorStats, OrderingAndConcentratedLimit) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (int t = 0; t < 50; ++t) {
    std::vector<Phase> est;
    for (int i = 0; i < 100; ++i) est.emplace_back(1.0 + u(rng));
    const auto s = error_stats(Phase(1.0), est);
    EXPECT_LE(s.mean_abs, s.rms + 1e-15);
    EXPECT_GE(s.holevo_var, 0.0);
    // Holevo variance measures spread about the circular mean, rms about the
    // truth; with a zero-mean sample both agree to second order.
    std::complex<double> m = 0.0;
    for (const auto& e : est) m += std::polar(1.0, e.radians() - 1.0);
    m /= static_cast<double>(est.size());
    const double bias2 = std::pow(std::arg(m), 2);
    EXPECT_NEAR(s.holevo_var, s.rms * s.rms - bias2, 0.05 * s.rms * s.rms);
  }
}

TEST(ErrorStats, PerTrialTruths) {
  const std::vector<Phase> truths{Phase(1.0), Phase(-2.0)};
  const std::vector<Phase> est{Phase(1.1), Phase(-1.9)};
  const auto s = error_stats(truths, est);
  EXPECT_NEAR(s.mean_abs, 0.1, 1e-12);
  EXPECT_NEAR(s.holevo_var, 0.0, 1e-12);
}

TEST(Spectrum, ValidatesWeights) {
  EXPECT_THROW(Spectrum({{Phase(0.0), 0.7}}), std::invalid_argument);
  EXPECT_THROW(Spectrum({{Phase(0.0), 1.2}, {Phase(1.0), -0.2}}), std::invalid_argument);
  EXPECT_NO_THROW(Spectrum({{Phase(0.0), 0.25}, {Phase(1.0), 0.75}}));
}

TEST(Spectrum, MergesDegenerateLines) {
  const Spectrum s({{Phase(0.3), 0.25}, {Phase(0.3), 0.25}, {Phase(-1.0), 0.5}});
  ASSERT_EQ(s.size(), 2u);
  double total = 0.0;
  for (const auto& line : s.lines()) {
    total += line.weight;
    if (std::abs(line.phase.radians() - 0.3) < 1e-15) EXPECT_DOUBLE_EQ(line.weight, 0.5);
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Spectrum, NormalizedAndSignal) {
  const auto s = Spectrum::normalized({{Phase(0.7), 3.0}, {Phase(-1.1), 2.0}});
  for (int k = 0; k < 6; ++k) {
    const std::complex<double> oracle = 0.6 * std::polar(1.0, 0.7 * k) + 0.4 * std::polar(1.0, -1.1 * k);
    EXPECT_NEAR(std::abs(s.signal(k) - oracle), 0.0, 1e-14);
  }
  EXPECT_NEAR(s.dominant().phase.radians(), 0.7, 1e-15);
}

TEST(Spectrum, TextRoundTrip) {
  const auto s = Spectrum::normalized({{Phase(0.123456789012345), 1.0}, {Phase(-2.5), 2.0}, {Phase(3.0), 0.5}});
  std::stringstream buffer;
  write_spectrum(buffer, s);
  const auto back = read_spectrum(buffer);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back[i].phase.radians(), s[i].phase.radians());
    EXPECT_EQ(back[i].weight, s[i].weight);
  }
}

}  // namespace
}  // namespace qpe
