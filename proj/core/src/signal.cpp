#include "qpe/signal.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qpe/chi.hpp"
#include "qpe/phase.hpp"

namespace qpe {

SymmetricSignal extend_negative(const SignalEstimate& s) {
  SymmetricSignal out;
  out.K = s.K;
  out.g.resize(static_cast<std::size_t>(2 * s.K + 1));
  out.sigma.resize(out.g.size());
  for (int k = -s.K; k <= s.K; ++k) {
    const auto src = static_cast<std::size_t>(k < 0 ? -k : k);
    out.g[static_cast<std::size_t>(k + s.K)] = k < 0 ? std::conj(s.g[src]) : s.g[src];
    out.sigma[static_cast<std::size_t>(k + s.K)] = s.sigma[src];
  }
  return out;
}

SignalEstimate restrict_nonnegative(const SymmetricSignal& s) {
  SignalEstimate out;
  out.K = s.K;
  out.g.assign(s.g.begin() + s.K, s.g.end());
  out.sigma.assign(s.sigma.begin() + s.K, s.sigma.end());
  return out;
}

std::complex<double> single_round_signal_value(double p0_beta0, double p0_beta_half_pi) {
  return {2.0 * p0_beta0 - 1.0, -(2.0 * p0_beta_half_pi - 1.0)};
}

SignalEstimate g_from_single_round(const AggregatedCounts& counts) {
  if (counts.mode() != CountsMode::single_round) {
    throw std::invalid_argument("g_from_single_round: counts are multi-round");
  }
  SignalEstimate s;
  s.K = counts.max_k();
  if (s.K < 1) throw std::invalid_argument("g_from_single_round: no data");
  s.g.assign(static_cast<std::size_t>(s.K) + 1, 0.0);
  s.sigma.assign(static_cast<std::size_t>(s.K) + 1, 0.0);
  s.g[0] = 1.0;
  for (int k = 1; k <= s.K; ++k) {
    const auto n0 = counts.shots(k, 0.0);
    const auto n1 = counts.shots(k, kPi / 2);
    if (n0 == 0 || n1 == 0) {
      throw std::invalid_argument("g_from_single_round: missing beta = 0 or pi/2 data at k = " +
                                  std::to_string(k));
    }
    const double f0 = static_cast<double>(counts.single_count(k, 0.0, 0)) / static_cast<double>(n0);
    const double f1 =
        static_cast<double>(counts.single_count(k, kPi / 2, 0)) / static_cast<double>(n1);
    s.g[static_cast<std::size_t>(k)] = single_round_signal_value(f0, f1);
    const double var = 4.0 * f0 * (1.0 - f0) / static_cast<double>(n0) +
                       4.0 * f1 * (1.0 - f1) / static_cast<double>(n1);
    s.sigma[static_cast<std::size_t>(k)] = std::sqrt(var);
  }
  return s;
}

SignalEstimate g_from_single_round_exact(const Spectrum& spectrum, int K, const NoiseModel& noise) {
  if (K < 1) throw std::invalid_argument("g_from_single_round_exact: K must be >= 1");
  SignalEstimate s;
  s.K = K;
  s.g.assign(static_cast<std::size_t>(K) + 1, 0.0);
  s.sigma.assign(static_cast<std::size_t>(K) + 1, 0.0);
  s.g[0] = 1.0;
  for (int k = 1; k <= K; ++k) {
    s.g[static_cast<std::size_t>(k)] =
        single_round_signal_value(round_outcome_prob(spectrum, k, 0.0, 0, noise),
                                  round_outcome_prob(spectrum, k, kPi / 2, 0, noise));
  }
  return s;
}

namespace {

SignalEstimate from_hamming(int total_k, const std::vector<double>& prob, double shots) {
  const auto table = ChiTable::shared(total_k);
  const int half = total_k / 2;
  const int side = half + 1;
  SignalEstimate s;
  s.K = half;
  s.g.assign(static_cast<std::size_t>(half) + 1, 0.0);
  s.sigma.assign(static_cast<std::size_t>(half) + 1, 0.0);
  s.g[0] = 1.0;
  for (int k = 1; k <= half; ++k) {
    std::complex<double> g = 0.0;
    double var = 0.0;
    for (int a = 0; a <= half; ++a) {
      for (int b = 0; b <= half; ++b) {
        const double p = prob[static_cast<std::size_t>(a * side + b)];
        if (p == 0.0) continue;
        const auto chi = (*table)(k, a, b);
        g += chi * p;
        if (shots > 0.0) var += std::norm(chi) * p * (1.0 - p) / shots;
      }
    }
    s.g[static_cast<std::size_t>(k)] = g;
    s.sigma[static_cast<std::size_t>(k)] = std::sqrt(var);
  }
  return s;
}

}  // namespace

SignalEstimate g_from_multi_round(const AggregatedCounts& counts) {
  if (counts.mode() != CountsMode::multi_round) {
    throw std::invalid_argument("g_from_multi_round: counts are single-round");
  }
  if (counts.multi_shots() == 0) throw std::invalid_argument("g_from_multi_round: no data");
  const int total_k = counts.design_k();
  const int side = total_k / 2 + 1;
  std::vector<double> prob(static_cast<std::size_t>(side * side), 0.0);
  const double n = static_cast<double>(counts.multi_shots());
  for (const auto& [key, count] : counts.multi_tallies()) {
    prob[static_cast<std::size_t>(key.first * side + key.second)] = static_cast<double>(count) / n;
  }
  return from_hamming(total_k, prob, n);
}

SignalEstimate g_from_hamming_distribution(int total_k, const std::vector<double>& table) {
  if (total_k <= 0 || total_k % 2 != 0) {
    throw std::invalid_argument("g_from_hamming_distribution: K must be even and positive");
  }
  const auto side = static_cast<std::size_t>(total_k / 2 + 1);
  if (table.size() != side * side) {
    throw std::invalid_argument("g_from_hamming_distribution: table size mismatch");
  }
  return from_hamming(total_k, table, 0.0);
}

SignalEstimate exact_signal(const Spectrum& spectrum, int K) {
  if (K < 0) throw std::invalid_argument("exact_signal: K must be >= 0");
  SignalEstimate s;
  s.K = K;
  s.g.resize(static_cast<std::size_t>(K) + 1);
  s.sigma.assign(static_cast<std::size_t>(K) + 1, 0.0);
  for (int k = 0; k <= K; ++k) s.g[static_cast<std::size_t>(k)] = spectrum.signal(k);
  return s;
}

void write_signal_csv(std::ostream& out, const SignalEstimate& s) {
  out << std::setprecision(17) << "k,re_g,im_g,sigma\n";
  for (int k = 0; k <= s.K; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out << k << ',' << s.g[i].real() << ',' << s.g[i].imag() << ',' << s.sigma[i] << '\n';
  }
}

SignalEstimate read_signal_csv(std::istream& in) {
  SignalEstimate s;
  std::string row;
  bool header = false;
  while (std::getline(in, row)) {
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty() || row[0] == '#') continue;
    if (!header) {
      if (row != "k,re_g,im_g,sigma") throw std::runtime_error("signal csv: bad header '" + row + "'");
      header = true;
      continue;
    }
    std::stringstream ss(row);
    std::string f[4];
    for (auto& field : f) std::getline(ss, field, ',');
    const int k = std::stoi(f[0]);
    if (k != static_cast<int>(s.g.size())) throw std::runtime_error("signal csv: k out of order");
    s.g.emplace_back(std::stod(f[1]), std::stod(f[2]));
    s.sigma.push_back(std::stod(f[3]));
  }
  if (s.g.empty()) throw std::runtime_error("signal csv: no rows");
  s.K = static_cast<int>(s.g.size()) - 1;
  return s;
}

}  // namespace qpe
