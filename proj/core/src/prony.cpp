#include "qpe/prony.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qpe {

const char* to_string(PronyMode mode) {
  return mode == PronyMode::symmetric ? "symmetric" : "positive_only";
}

PronyMode prony_mode_from_string(const std::string& name) {
  if (name == "symmetric") return PronyMode::symmetric;
  if (name == "positive_only" || name == "positive") return PronyMode::positive_only;
  throw std::invalid_argument("unknown Prony mode '" + name + "'");
}

HankelPair build_hankel(const SignalEstimate& signal, int l, PronyMode mode) {
  const int K = signal.K;
  if (l < 1 || l > K) {
    throw std::invalid_argument("build_hankel: l must lie in 1..K (l=" + std::to_string(l) +
                                ", K=" + std::to_string(K) + ")");
  }
  const bool sym = mode == PronyMode::symmetric;
  const int span = sym ? 2 * K + 1 : K + 1;
  const int cols = span - l;
  HankelPair pair;
  pair.offset = sym ? -K : 0;
  pair.G0.resize(l, cols);
  pair.G1.resize(l, cols);
  pair.sigma1.resize(l, cols);
  auto value = [&](int k) {
    return k < 0 ? std::conj(signal.g[static_cast<std::size_t>(-k)])
                 : signal.g[static_cast<std::size_t>(k)];
  };
  auto sigma = [&](int k) { return signal.sigma[static_cast<std::size_t>(k < 0 ? -k : k)]; };
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int k = i + j + pair.offset;
      pair.G0(i, j) = value(k);
      pair.G1(i, j) = value(k + 1);
      pair.sigma1(i, j) = sigma(k + 1);
    }
  }
  return pair;
}

Eigen::MatrixXcd solve_shift(const HankelPair& pair, bool weighted) {
  if (pair.G0.cols() == 0 || pair.G0.norm() == 0.0) {
    throw std::invalid_argument("solve_shift: G0 is empty or identically zero");
  }
  const Eigen::MatrixXcd A = pair.G0.transpose();
  const Eigen::MatrixXcd B = pair.G1.transpose();
  constexpr int kOptions = Eigen::ComputeThinU | Eigen::ComputeThinV;

  if (!weighted) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, kOptions);
    svd.setThreshold(kRankThreshold);
    return svd.solve(B).transpose();
  }

  double floor = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < pair.sigma1.size(); ++i) {
    const double s = pair.sigma1.data()[i];
    if (s > 0.0) floor = std::min(floor, s);
  }
  if (!std::isfinite(floor)) floor = 1.0;

  const Eigen::Index l = pair.G0.rows();
  Eigen::MatrixXcd T(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    const Eigen::VectorXd w = pair.sigma1.row(i).transpose().cwiseMax(floor).cwiseInverse();
    const Eigen::MatrixXcd Aw = w.asDiagonal() * A;
    const Eigen::VectorXcd bw = w.asDiagonal() * B.col(i);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(Aw, kOptions);
    svd.setThreshold(kRankThreshold);
    T.row(i) = svd.solve(bw).transpose();
  }
  return T;
}

std::vector<EigenPhase> eigenphases(const Eigen::MatrixXcd& shift) {
  if (shift.rows() != shift.cols() || shift.rows() == 0) {
    throw std::invalid_argument("eigenphases: shift operator must be square and non-empty");
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(shift, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenphases: eigensolver did not converge");
  }
  std::vector<EigenPhase> out;
  out.reserve(static_cast<std::size_t>(shift.rows()));
  for (const auto& lambda : solver.eigenvalues()) {
    out.push_back({Phase(std::arg(lambda)), std::abs(lambda)});
  }
  return out;
}

namespace {

struct AmplitudeFit {
  std::vector<double> amplitudes;
  double residual = 0.0;
};

AmplitudeFit fit_amplitudes(const std::vector<EigenPhase>& eig, const SignalEstimate& signal,
                            PronyMode mode, double ridge) {
  const int K = signal.K;
  const auto n = static_cast<Eigen::Index>(eig.size());
  const Eigen::Index extra = ridge > 0.0 ? n : 0;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * (K + 1) + extra, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * (K + 1) + extra);
  if (extra > 0) M.bottomRows(extra).diagonal().setConstant(std::sqrt(ridge));
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& e = eig[static_cast<std::size_t>(j)];
    const double r = mode == PronyMode::positive_only ? std::min(e.modulus, 1.0) : 1.0;
    const std::complex<double> z = std::polar(r, e.phase.radians());
    std::complex<double> power = 1.0;
    for (int k = 0; k <= K; ++k) {
      M(k, j) = power.real();
      M(K + 1 + k, j) = power.imag();
      power *= z;
    }
  }
  for (int k = 0; k <= K; ++k) {
    rhs(k) = signal.g[static_cast<std::size_t>(k)].real();
    rhs(K + 1 + k) = signal.g[static_cast<std::size_t>(k)].imag();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankThreshold);
  const Eigen::VectorXd a = svd.solve(rhs);
  return {{a.data(), a.data() + a.size()}, (M * a - rhs).squaredNorm()};
}

}  // namespace

std::vector<double> recover_amplitudes(const std::vector<EigenPhase>& eig,
                                       const SignalEstimate& signal, PronyMode mode, double ridge) {
  if (eig.empty()) throw std::invalid_argument("recover_amplitudes: no phases");
  if (!(ridge >= 0.0)) throw std::invalid_argument("recover_amplitudes: ridge must be >= 0");
  return fit_amplitudes(eig, signal, mode, ridge).amplitudes;
}

double shared_decay(const std::vector<EigenPhase>& eig, const SignalEstimate& signal, double ridge) {
  if (eig.empty()) throw std::invalid_argument("shared_decay: no phases");
  std::vector<double> candidates;
  for (const auto& e : eig) candidates.push_back(std::min(e.modulus, 1.0));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<EigenPhase> trial = eig;
  double best = 1.0;
  double best_residual = std::numeric_limits<double>::infinity();
  for (double r : candidates) {
    for (auto& e : trial) e.modulus = r;
    const double residual = fit_amplitudes(trial, signal, PronyMode::positive_only, ridge).residual;
    if (residual < best_residual) {
      best_residual = residual;
      best = r;
    }
  }
  return best;
}

std::vector<double> PronyEstimate::clipped_amplitudes() const {
  std::vector<double> out;
  double total = 0.0;
  for (const auto& c : components) {
    out.push_back(std::max(c.amplitude, 0.0));
    total += out.back();
  }
  for (auto& a : out) a = total > 0.0 ? a / total : 1.0 / static_cast<double>(out.size());
  return out;
}

double amplitude_ridge(const SignalEstimate& signal) {
  double total = 0.0;
  for (double s : signal.sigma) total += s * s;
  // sigma(k)^2 covers Re and Im together; each stacked row carries half.
  return 0.5 * total / static_cast<double>(signal.sigma.size());
}

int default_l(int K, PronyMode mode) {
  return mode == PronyMode::symmetric ? K : std::max(1, (K + 1) / 2);
}

namespace {

// Eigenphases closer than this many units of 1/(K+1) are not resolved by
// the window and share one amplitude column.
constexpr double kUnresolvedSpacing = 0.5;

std::vector<int> reciprocal_groups(const std::vector<EigenPhase>& eig) {
  const std::size_t n = eig.size();
  std::vector<double> log_r(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_r[i] = std::log(std::max(eig[i].modulus, std::numeric_limits<double>::min()));
  }
  // Candidate (i, j) costs the distance between lambda_i and 1/conj(lambda_j)
  // in log coordinates; i == j measures how far lambda_i is off the circle.
  struct Candidate {
    double cost;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double cost = std::abs(log_r[i] + log_r[j]) + circular_distance(eig[i].phase, eig[j].phase);
      candidates.push_back({cost, i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
  std::vector<int> group(n, -1);
  int next = 0;
  for (const auto& c : candidates) {
    if (group[c.i] >= 0 || group[c.j] >= 0) continue;
    group[c.i] = next;
    group[c.j] = next;
    ++next;
  }
  return group;
}

// Single-linkage merge of groups whose mean phases lie closer than `tau`.
// Returns labels renumbered 0..G-1 in order of first appearance.
std::vector<int> merge_unresolved(const std::vector<EigenPhase>& eig, std::vector<int> group,
                                  double tau) {
  const int n_groups = *std::max_element(group.begin(), group.end()) + 1;
  std::vector<std::complex<double>> phasor(static_cast<std::size_t>(n_groups), 0.0);
  for (std::size_t j = 0; j < eig.size(); ++j) {
    phasor[static_cast<std::size_t>(group[j])] += std::polar(1.0, eig[j].phase.radians());
  }
  std::vector<int> parent(static_cast<std::size_t>(n_groups));
  for (int g = 0; g < n_groups; ++g) parent[static_cast<std::size_t>(g)] = g;
  auto find = [&](int g) {
    while (parent[static_cast<std::size_t>(g)] != g) g = parent[static_cast<std::size_t>(g)];
    return g;
  };
  for (int a = 0; a < n_groups; ++a) {
    for (int b = a + 1; b < n_groups; ++b) {
      const Phase pa(std::arg(phasor[static_cast<std::size_t>(a)]));
      const Phase pb(std::arg(phasor[static_cast<std::size_t>(b)]));
      if (circular_distance(pa, pb) < tau) {
        const int ra = find(a);
        const int rb = find(b);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
      }
    }
  }
  std::vector<int> label(static_cast<std::size_t>(n_groups), -1);
  int next = 0;
  for (auto& g : group) {
    const int root = find(g);
    if (label[static_cast<std::size_t>(root)] < 0) label[static_cast<std::size_t>(root)] = next++;
    g = label[static_cast<std::size_t>(root)];
  }
  return group;
}

}  // namespace

PronyEstimate estimate(const SignalEstimate& signal, const PronyOptions& options) {
  PronyEstimate est;
  est.mode = options.mode;
  est.l = options.l.value_or(default_l(signal.K, options.mode));
  const auto pair = build_hankel(signal, est.l, options.mode);
  const auto eig = eigenphases(solve_shift(pair, options.weighted));
  const double ridge = amplitude_ridge(signal);

  // With conjugate-symmetric data the eigenvalues come in near-reciprocal
  // pairs (lambda, 1/conj(lambda)) sharing a phase. Columns at phases the
  // window cannot tell apart make the amplitude fit ill-posed (large
  // amplitudes of opposite sign), so such eigenvalues are grouped, each
  // group is fitted with one column at its mean phase, and the members
  // split the group amplitude.
  std::vector<int> group(eig.size());
  if (options.mode == PronyMode::symmetric) {
    group = reciprocal_groups(eig);
  } else {
    for (std::size_t j = 0; j < eig.size(); ++j) group[j] = static_cast<int>(j);
  }
  // A noiseless signal (zero ridge) resolves any spacing.
  const double tau = ridge > 0.0 ? kUnresolvedSpacing / (signal.K + 1) : 0.0;
  const auto merged = merge_unresolved(eig, group, tau);

  // Depolarizing damping is common to every line, so positive_only fits use
  // one decay; a per-line decay lets fast-decaying spurious eigenvalues soak
  // up the low-k signal.
  const double decay = options.mode == PronyMode::symmetric ? 1.0 : shared_decay(eig, signal, ridge);
  const double log_decay = std::log(decay);

  // A merged group is placed at the mean phase of its original subgroup
  // lying closest to the expected modulus, so a spurious neighbour does not
  // drag a genuine line.
  const int n_sub = *std::max_element(group.begin(), group.end()) + 1;
  const int n_merged = *std::max_element(merged.begin(), merged.end()) + 1;
  std::vector<std::complex<double>> sub_phasor(static_cast<std::size_t>(n_sub), 0.0);
  std::vector<double> sub_offset(static_cast<std::size_t>(n_sub), 0.0);
  std::vector<int> sub_size(static_cast<std::size_t>(n_sub), 0);
  std::vector<int> sub_to_merged(static_cast<std::size_t>(n_sub), 0);
  std::vector<int> members(static_cast<std::size_t>(n_merged), 0);
  for (std::size_t j = 0; j < eig.size(); ++j) {
    const auto g = static_cast<std::size_t>(group[j]);
    sub_phasor[g] += std::polar(1.0, eig[j].phase.radians());
    sub_offset[g] += std::abs(std::log(std::max(eig[j].modulus, std::numeric_limits<double>::min())) - log_decay);
    ++sub_size[g];
    sub_to_merged[g] = merged[j];
    ++members[static_cast<std::size_t>(merged[j])];
  }
  std::vector<int> best(static_cast<std::size_t>(n_merged), -1);
  for (int g = 0; g < n_sub; ++g) {
    const auto m = static_cast<std::size_t>(sub_to_merged[static_cast<std::size_t>(g)]);
    const double off = sub_offset[static_cast<std::size_t>(g)] / sub_size[static_cast<std::size_t>(g)];
    if (best[m] < 0 || off < sub_offset[static_cast<std::size_t>(best[m])] /
                                 sub_size[static_cast<std::size_t>(best[m])]) {
      best[m] = g;
    }
  }
  std::vector<EigenPhase> reps;
  reps.reserve(static_cast<std::size_t>(n_merged));
  for (int b : best) reps.push_back({Phase(std::arg(sub_phasor[static_cast<std::size_t>(b)])), decay});
  const auto group_amps = recover_amplitudes(reps, signal, options.mode, ridge);
  for (std::size_t j = 0; j < eig.size(); ++j) {
    const auto g = static_cast<std::size_t>(merged[j]);
    est.components.push_back({reps[g].phase, group_amps[g] / members[g], eig[j].modulus});
  }
  std::stable_sort(est.components.begin(), est.components.end(),
                   [](const PronyComponent& a, const PronyComponent& b) {
                     if (a.amplitude != b.amplitude) return a.amplitude > b.amplitude;
                     return a.phase < b.phase;
                   });
  return est;
}

Phase select_target(const PronyEstimate& est, TargetPolicy policy, std::optional<Phase> reference) {
  if (est.components.empty()) throw std::invalid_argument("select_target: empty estimate");
  if (policy == TargetPolicy::max_amplitude) {
    // Members of one group share a phase and split its amplitude.
    std::vector<std::pair<Phase, double>> lines;
    for (const auto& c : est.components) {
      auto it = std::find_if(lines.begin(), lines.end(),
                             [&](const auto& line) { return line.first == c.phase; });
      if (it == lines.end()) {
        lines.emplace_back(c.phase, c.amplitude);
      } else {
        it->second += c.amplitude;
      }
    }
    const auto it = std::min_element(lines.begin(), lines.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    return it->first;
  }
  if (!reference) throw std::invalid_argument("select_target: nearest_reference needs a reference");
  const auto it = std::min_element(est.components.begin(), est.components.end(),
                                   [&](const PronyComponent& a, const PronyComponent& b) {
                                     const double da = circular_distance(a.phase, *reference);
                                     const double db = circular_distance(b.phase, *reference);
                                     if (da != db) return da < db;
                                     return a.phase < b.phase;
                                   });
  return it->phase;
}

double predicted_single_freq_variance(int K, double phase, double var_re, double var_im) {
  if (K < 1) throw std::invalid_argument("predicted_single_freq_variance: K must be >= 1");
  const double s = std::sin(K * phase);
  const double c = std::cos(K * phase);
  return (s * s * var_re + c * c * var_im) / (static_cast<double>(K) * K);
}

double predicted_single_freq_variance(int K, double N, double phase, bool weighted) {
  if (!(N > 0.0)) throw std::invalid_argument("predicted_single_freq_variance: N must be > 0");
  if (weighted) {
    if (K < 1) throw std::invalid_argument("predicted_single_freq_variance: K must be >= 1");
    return 1.0 / (static_cast<double>(K) * N);
  }
  return predicted_single_freq_variance(K, phase, 1.0 / N, 1.0 / N);
}

void write_prony_csv(std::ostream& out, const PronyEstimate& est) {
  out << "# mode=" << to_string(est.mode) << " l=" << est.l << '\n';
  out << "phase,amplitude,modulus\n" << std::setprecision(17);
  for (const auto& c : est.components) {
    out << c.phase.radians() << ',' << c.amplitude << ',' << c.modulus << '\n';
  }
}

}  // namespace qpe
