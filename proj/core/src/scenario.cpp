#include "qpe/scenario.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "qpe/chi.hpp"
#include "qpe/design.hpp"
#include "qpe/error_stats.hpp"
#include "qpe/multi_posterior.hpp"
#include "qpe/signal.hpp"
#include "qpe/simulator.hpp"
#include "qpe/statistics.hpp"

namespace qpe {

namespace {

constexpr int kMaxFreq = 20000;
constexpr double kClusterThreshold = 0.05;

template <typename E, std::size_t N>
E parse_enum(const std::string& name, const std::array<std::pair<const char*, E>, N>& table,
             const char* what) {
  for (const auto& [text, value] : table) {
    if (name == text) return value;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + name + "'");
}

constexpr std::array<std::pair<const char*, ScenarioKind>, 5> kScenarioNames{{
    {"single_ev_scaling", ScenarioKind::single_ev_scaling},
    {"two_ev_surface", ScenarioKind::two_ev_surface},
    {"many_ev", ScenarioKind::many_ev},
    {"depolarizing_study", ScenarioKind::depolarizing_study},
    {"chi_selftest", ScenarioKind::chi_selftest},
}};
constexpr std::array<std::pair<const char*, EstimatorKind>, 2> kEstimatorNames{{
    {"time_series", EstimatorKind::time_series},
    {"bayes", EstimatorKind::bayes},
}};
constexpr std::array<std::pair<const char*, DesignKind>, 3> kDesignNames{{
    {"ts_single_round", DesignKind::ts_single_round},
    {"ts_multi_round", DesignKind::ts_multi_round},
    {"bayes_adaptive", DesignKind::bayes_adaptive},
}};

template <typename E, std::size_t N>
const char* enum_name(E value, const std::array<std::pair<const char*, E>, N>& table) {
  for (const auto& [text, v] : table) {
    if (v == value) return text;
  }
  return "?";
}

// Stream index of one (point, trial, sub-stream) triple.
std::uint64_t stream_id(std::size_t point, int trial, std::uint64_t sub) {
  return (static_cast<std::uint64_t>(point) << 40) ^ (static_cast<std::uint64_t>(trial) << 16) ^ sub;
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

struct Point {
  int K = 0;
  std::uint64_t N = 0;  // 0 when N is swept inside the job (checkpoints)
  double a0 = 1.0;
  double delta = 0.0;
  int n_eig = 1;
};

// Spectrum plus the phase being estimated.
struct Truth {
  Spectrum spectrum;
  double target = 0.0;
};

Truth draw_single(Rng& rng) {
  const double phi = uniform(rng, -kPi, kPi);
  return {Spectrum::single(phi), Phase(phi).radians()};
}

Truth draw_two(Rng& rng, double a0, double delta) {
  const double phi0 = uniform(rng, -kPi, kPi);
  const double side = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  if (a0 >= 1.0) return {Spectrum::single(phi0), Phase(phi0).radians()};
  return {Spectrum::normalized({{Phase(phi0), a0}, {Phase(phi0 + side * delta), 1.0 - a0}}),
          Phase(phi0).radians()};
}

// Target at 0, the nearest spurious line exactly at delta, the rest uniform
// on [delta, phi_max]; spurious weights uniform on [0, 0.5] rescaled to 1 - a0.
Truth draw_many(Rng& rng, int n_eig, double a0, double delta, double phi_max) {
  if (n_eig == 1) return {Spectrum::single(0.0), 0.0};
  std::vector<double> phases{delta};
  for (int j = 2; j < n_eig; ++j) phases.push_back(uniform(rng, delta, phi_max));
  std::vector<double> weights;
  double total = 0.0;
  for (int j = 1; j < n_eig; ++j) {
    weights.push_back(uniform(rng, 0.0, 0.5));
    total += weights.back();
  }
  std::vector<SpectralLine> lines{{Phase(0.0), a0}};
  for (std::size_t j = 0; j < phases.size(); ++j) {
    const double w = total > 0.0 ? (1.0 - a0) * weights[j] / total : (1.0 - a0) / phases.size();
    lines.push_back({Phase(phases[j]), w});
  }
  return {Spectrum::normalized(std::move(lines)), 0.0};
}

// Target uniform on the circle; spurious phases too, weights as above.
Truth draw_scattered(Rng& rng, int n_eig, double a0) {
  const double phi0 = uniform(rng, -kPi, kPi);
  if (n_eig == 1) return {Spectrum::single(phi0), Phase(phi0).radians()};
  std::vector<double> phases;
  std::vector<double> weights;
  double total = 0.0;
  for (int j = 1; j < n_eig; ++j) {
    phases.push_back(uniform(rng, -kPi, kPi));
    weights.push_back(uniform(rng, 0.0, 0.5));
    total += weights.back();
  }
  std::vector<SpectralLine> lines{{Phase(phi0), a0}};
  for (std::size_t j = 0; j < phases.size(); ++j) {
    lines.push_back({Phase(phases[j]), (1.0 - a0) * weights[j] / total});
  }
  return {Spectrum::normalized(std::move(lines)), Phase(phi0).radians()};
}

double target_gap(const Truth& truth) {
  double gap = kPi;
  for (const auto& line : truth.spectrum.lines()) {
    const double d = circular_distance(line.phase, Phase(truth.target));
    if (d > 0.0) gap = std::min(gap, d);
  }
  return gap;
}

// Largest bin edge not above the gap; 0 below the first edge.
double gap_bin(double gap, const std::vector<double>& edges) {
  double bin = 0.0;
  for (double e : edges) {
    if (e <= gap) bin = std::max(bin, e);
  }
  return bin;
}

// Target uniform on the circle, the others at target + U[delta, pi] with
// weights uniform on [0, 1] rescaled to 1 - a0.
Truth draw_gapped(Rng& rng, int n_eig, double a0, double delta) {
  const double phi0 = uniform(rng, -kPi, kPi);
  if (n_eig == 1) return {Spectrum::single(phi0), Phase(phi0).radians()};
  std::vector<double> offsets;
  std::vector<double> weights;
  double total = 0.0;
  for (int j = 1; j < n_eig; ++j) {
    offsets.push_back(uniform(rng, delta, kPi));
    weights.push_back(uniform01(rng));
    total += weights.back();
  }
  std::vector<SpectralLine> lines{{Phase(phi0), a0}};
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    lines.push_back({Phase(phi0 + offsets[j]), (1.0 - a0) * weights[j] / total});
  }
  return {Spectrum::normalized(std::move(lines)), Phase(phi0).radians()};
}

struct TsSettings {
  DesignKind design = DesignKind::ts_single_round;
  PronyMode mode = PronyMode::symmetric;
  std::optional<int> l;
  bool weighted = false;
  TargetPolicy target = TargetPolicy::max_amplitude;
};

TsSettings ts_settings(const ScenarioConfig& c, int K, DesignKind design, PronyMode mode) {
  TsSettings s;
  s.design = design;
  s.mode = mode;
  s.target = c.target;
  const bool multi = design == DesignKind::ts_multi_round;
  s.weighted = c.weighted.value_or(multi);
  if (c.l) {
    s.l = c.l;
  } else if (multi) {
    s.l = 1;
  } else if (mode == PronyMode::symmetric) {
    s.l = std::max(1, (K + 1) / 2);
  }
  return s;
}

TrialRecord run_ts(const Truth& truth, int K, std::uint64_t N, const NoiseModel& noise,
                   const TsSettings& s, Rng& rng) {
  const bool multi = s.design == DesignKind::ts_multi_round;
  const auto counts = multi ? sample_schedule(truth.spectrum, ts_multi_round_campaign(K, N), noise, rng)
                            : sample_schedule(truth.spectrum, ts_single_round_schedule(K, N), noise, rng);
  const auto signal = multi ? g_from_multi_round(counts) : g_from_single_round(counts);
  PronyOptions options;
  options.l = s.l;
  options.mode = s.mode;
  options.weighted = s.weighted;
  const auto est = estimate(signal, options);
  const Phase target(truth.target);
  const Phase picked = select_target(est, s.target, target);
  TrialRecord r;
  r.K = K;
  r.N = N;
  r.truth = truth.target;
  r.estimate = picked.radians();
  r.error = circular_distance(picked, target);
  r.k_tot = counts.total_applications();
  return r;
}

struct BayesSettings {
  int cap = 50;
  int n_freq = kMaxFreq;
  int n_track = 1;
  double a0 = 0.5;
  double prior_sigma = 0.1;
  bool random_k = false;
  bool reject = true;
  NoiseModel likelihood_noise;
};

// One adaptive run to the largest checkpoint; a record per checkpoint.
std::vector<TrialRecord> run_bayes(const Truth& truth, const std::vector<std::uint64_t>& checkpoints,
                                   const NoiseModel& noise, const BayesSettings& s, Rng& rng) {
  auto post = MultiEigPosterior::flat(s.n_track, s.n_freq, s.a0, s.prior_sigma);
  AdaptiveDesign design(s.cap, s.random_k);
  const Phase target(truth.target);
  std::vector<TrialRecord> out;
  std::size_t next = 0;
  const std::uint64_t last = checkpoints.back();
  for (std::uint64_t n = 1; n <= last; ++n) {
    const double var = post.marginal(0).holevo_var();
    const double sigma = var > 0.0 ? std::sqrt(var) : std::numeric_limits<double>::infinity();
    const RoundSpec round = design.next(sigma, rng);
    const auto spec = ExperimentSpec::single(round.k, round.beta);
    const auto outcome = sample_experiment(truth.spectrum, spec, noise, rng);
    post.update(spec.rounds(), outcome, s.likelihood_noise);
    while (next < checkpoints.size() && checkpoints[next] == n) {
      const auto guess = post.marginal(0).estimate_phase().value_or(Phase(0.0));
      TrialRecord r;
      r.N = n;
      r.K = s.cap;
      r.truth = truth.target;
      r.estimate = guess.radians();
      r.error = circular_distance(guess, target);
      r.k_tot = design.total_applications();
      if (s.reject && s.n_track > 1) {
        for (int j = 1; j < post.size() && !r.rejected; ++j) {
          if (&post.marginal(j) == &post.marginal(0)) continue;
          const auto other = post.marginal(j).estimate_phase();
          if (!other) continue;
          const std::array<Phase, 2> pair{guess, *other};
          r.rejected = rejection_check(pair, kClusterThreshold);
        }
      }
      out.push_back(r);
      ++next;
    }
  }
  return out;
}

BayesSettings bayes_settings(const ScenarioConfig& c, int cap, int n_lines, double a0,
                             const NoiseModel& noise) {
  BayesSettings s;
  s.cap = cap;
  const std::uint64_t n_max = *std::max_element(c.n_values.begin(), c.n_values.end());
  const std::uint64_t budget = n_max * static_cast<std::uint64_t>(cap);
  s.n_freq = c.n_freq.value_or(static_cast<int>(std::clamp<std::uint64_t>(budget, 2, kMaxFreq)));
  s.n_track = c.n_track.value_or(n_lines);
  s.a0 = s.n_track > 1 ? a0 : 1.0;
  s.prior_sigma = c.prior_sigma;
  s.random_k = c.random_k;
  s.reject = c.reject_clusters;
  s.likelihood_noise = noise;
  return s;
}

std::vector<std::uint64_t> sorted_checkpoints(const ScenarioConfig& c) {
  auto cps = c.n_values;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

NoiseModel noise_of(const ScenarioConfig& c) {
  return c.k_err ? NoiseModel::depolarizing(*c.k_err) : NoiseModel::none();
}

std::vector<Point> enumerate_points(const ScenarioConfig& c) {
  std::vector<Point> points;
  switch (c.scenario) {
    case ScenarioKind::single_ev_scaling:
      for (int K : c.k_values) {
        if (c.estimator == EstimatorKind::bayes) {
          points.push_back({K, 0, 1.0, 0.0, 1});
        } else {
          for (auto N : c.n_values) points.push_back({K, N, 1.0, 0.0, 1});
        }
      }
      break;
    case ScenarioKind::two_ev_surface:
      for (int K : c.k_values)
        for (auto N : c.n_values)
          for (double a0 : c.a0_values)
            for (double d : c.delta_values) points.push_back({K, N, a0, d, 2});
      break;
    case ScenarioKind::many_ev:
      for (int K : c.k_values)
        for (auto N : c.n_values)
          for (int n_eig : c.n_eig_values)
            for (double a0 : c.a0_values) {
              if (!c.confine) {
                points.push_back({K, N, a0, 0.0, n_eig});
                continue;
              }
              for (double d : c.delta_values) points.push_back({K, N, a0, d, n_eig});
            }
      break;
    case ScenarioKind::depolarizing_study:
      for (int K : c.k_values)
        for (int n_eig : c.n_eig_values)
          for (double a0 : c.a0_values)
            for (double d : c.delta_values) points.push_back({K, 0, a0, d, n_eig});
      break;
    case ScenarioKind::chi_selftest:
      break;
  }
  return points;
}

void stamp(TrialRecord& r, const std::string& series, const Point& p, int trial) {
  r.series = series;
  r.a0 = p.a0;
  r.delta = p.delta;
  r.n_eig = p.n_eig;
  r.trial = trial;
}

std::vector<TrialRecord> run_job(const ScenarioConfig& c, const Point& p, std::size_t point_index,
                                 int trial) {
  Rng truth_rng = make_rng(c.seed, stream_id(point_index, trial, 0));
  Rng rng = make_rng(c.seed, stream_id(point_index, trial, 1));
  const NoiseModel noise = noise_of(c);
  std::vector<TrialRecord> out;
  switch (c.scenario) {
    case ScenarioKind::single_ev_scaling: {
      const Truth truth = draw_single(truth_rng);
      if (c.estimator == EstimatorKind::bayes) {
        const auto s = bayes_settings(c, p.K, 1, 1.0, noise);
        for (auto& r : run_bayes(truth, sorted_checkpoints(c), noise, s, rng)) {
          stamp(r, "bayes", p, trial);
          out.push_back(r);
        }
      } else {
        const auto s = ts_settings(c, p.K, c.design, c.mode);
        auto r = run_ts(truth, p.K, p.N, noise, s, rng);
        stamp(r, to_string(c.design), p, trial);
        out.push_back(r);
      }
      break;
    }
    case ScenarioKind::two_ev_surface:
    case ScenarioKind::many_ev: {
      const bool scattered = c.scenario == ScenarioKind::many_ev && !c.confine;
      const Truth truth = c.scenario == ScenarioKind::two_ev_surface ? draw_two(truth_rng, p.a0, p.delta)
                          : scattered ? draw_scattered(truth_rng, p.n_eig, p.a0)
                                      : draw_many(truth_rng, p.n_eig, p.a0, p.delta, c.phi_max);
      const auto s = ts_settings(c, p.K, c.design, c.mode);
      auto r = run_ts(truth, p.K, p.N, noise, s, rng);
      stamp(r, to_string(c.design), p, trial);
      if (scattered) r.delta = gap_bin(target_gap(truth), c.delta_values);
      out.push_back(r);
      break;
    }
    case ScenarioKind::depolarizing_study: {
      const Truth truth = draw_gapped(truth_rng, p.n_eig, p.a0, p.delta);
      const auto plain = ts_settings(c, p.K, DesignKind::ts_single_round, PronyMode::symmetric);
      const auto compensated = ts_settings(c, p.K, DesignKind::ts_single_round, PronyMode::positive_only);
      std::uint64_t sub = 2;
      for (auto N : sorted_checkpoints(c)) {
        Rng a = make_rng(c.seed, stream_id(point_index, trial, sub++));
        auto r = run_ts(truth, p.K, N, noise, plain, a);
        stamp(r, "ts_uncompensated", p, trial);
        out.push_back(r);
        Rng b = make_rng(c.seed, stream_id(point_index, trial, sub++));
        r = run_ts(truth, p.K, N, noise, compensated, b);
        stamp(r, "ts_compensated", p, trial);
        out.push_back(r);
      }
      if (c.include_bayes) {
        const auto s = bayes_settings(c, p.K, static_cast<int>(truth.spectrum.size()), p.a0, noise);
        for (auto& r : run_bayes(truth, sorted_checkpoints(c), noise, s, rng)) {
          stamp(r, "bayes_compensated", p, trial);
          out.push_back(r);
        }
      }
      break;
    }
    case ScenarioKind::chi_selftest:
      break;
  }
  return out;
}

// Exhaustive closed-form vs enumeration check plus g reconstruction from
// exact Hamming-weight distributions of random spectra.
bool chi_selftest(std::uint64_t seed, std::string& message) {
  std::ostringstream log;
  double worst_chi = 0.0;
  for (int K : {2, 4, 6, 8}) {
    for (int k = 0; k <= K / 2; ++k) {
      for (int a = 0; a <= K / 2; ++a) {
        for (int b = 0; b <= K / 2; ++b) {
          worst_chi = std::max(worst_chi, std::abs(chi_closed_form(k, a, b, K) - chi_oracle(k, a, b, K)));
        }
      }
    }
  }
  Rng rng = make_rng(seed, 0xc41);
  double worst_g = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n_eig = 1 + static_cast<int>(uniform01(rng) * 4.0);
    std::vector<SpectralLine> lines;
    for (int j = 0; j < n_eig; ++j) lines.push_back({Phase(uniform(rng, -kPi, kPi)), uniform(rng, 0.05, 1.0)});
    const auto spectrum = Spectrum::normalized(std::move(lines));
    for (int K : {2, 4, 6, 8}) {
      const auto g = g_from_hamming_distribution(K, hamming_distribution(spectrum, K));
      for (int k = 0; k <= K / 2; ++k) {
        worst_g = std::max(worst_g, std::abs(g[k] - spectrum.signal(k)));
      }
    }
  }
  log << "chi closed form vs enumeration, K <= 8: max |diff| = " << worst_chi
      << "; g from exact Hamming distributions: max |diff| = " << worst_g;
  message = log.str();
  return worst_chi <= 1e-12 && worst_g <= 1e-10;
}

using GroupKey = std::tuple<std::string, int, std::uint64_t, double, double, int>;

GroupKey key_of(const TrialRecord& r) { return {r.series, r.K, r.N, r.a0, r.delta, r.n_eig}; }

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records, const ScenarioConfig& c) {
  std::map<GroupKey, std::size_t> index;
  std::vector<GroupKey> order;
  std::vector<std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    const auto key = key_of(r);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      order.push_back(key);
      groups.emplace_back();
    }
    groups[it->second].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    SummaryRow row;
    const auto& first = *groups[g].front();
    row.series = first.series;
    row.K = first.K;
    row.N = first.N;
    row.a0 = first.a0;
    row.delta = first.delta;
    row.n_eig = first.n_eig;
    std::vector<double> errors;
    std::vector<Phase> truths;
    std::vector<Phase> estimates;
    double k_tot = 0.0;
    for (const auto* r : groups[g]) {
      if (r->rejected) {
        ++row.rejected;
        continue;
      }
      errors.push_back(r->error);
      truths.emplace_back(r->truth);
      estimates.emplace_back(r->estimate);
      k_tot += static_cast<double>(r->k_tot);
    }
    row.trials = static_cast<int>(errors.size());
    if (!errors.empty()) {
      const auto ci = bootstrap_ci(errors, [](std::span<const double> v) { return mean(v); },
                                   c.bootstrap_resamples, 0.95, stream_seed(c.seed, 0xb0075ull + g));
      row.mean_error = ci.estimate;
      row.ci_lower = ci.lower;
      row.ci_upper = ci.upper;
      const auto stats = error_stats(truths, estimates);
      row.rms_error = stats.rms;
      row.holevo_var = stats.holevo_var;
      row.mean_k_tot = k_tot / static_cast<double>(errors.size());
    }
    rows.push_back(row);
  }
  // Series are listed together, each in sweep order.
  std::vector<std::string> series_order;
  for (const auto& r : rows) {
    if (std::find(series_order.begin(), series_order.end(), r.series) == series_order.end()) {
      series_order.push_back(r.series);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const SummaryRow& a, const SummaryRow& b) {
    const auto ia = std::find(series_order.begin(), series_order.end(), a.series) - series_order.begin();
    const auto ib = std::find(series_order.begin(), series_order.end(), b.series) - series_order.begin();
    return ia < ib;
  });
  return rows;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) s << (i ? " " : "") << values[i];
  return s.str();
}

}  // namespace

const char* to_string(ScenarioKind kind) { return enum_name(kind, kScenarioNames); }
const char* to_string(EstimatorKind kind) { return enum_name(kind, kEstimatorNames); }
const char* to_string(DesignKind kind) { return enum_name(kind, kDesignNames); }
ScenarioKind scenario_kind_from_string(const std::string& name) { return parse_enum(name, kScenarioNames, "scenario"); }
EstimatorKind estimator_kind_from_string(const std::string& name) { return parse_enum(name, kEstimatorNames, "estimator"); }
DesignKind design_kind_from_string(const std::string& name) { return parse_enum(name, kDesignNames, "design"); }

void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid scenario config: " + what); };
  if (c.scenario == ScenarioKind::chi_selftest) return;
  if (c.trials < 1) fail("trials must be >= 1");
  if (c.n_values.empty() || c.k_values.empty()) fail("n and k sweeps must not be empty");
  for (auto N : c.n_values) {
    if (N < 1) fail("every N must be >= 1");
  }
  for (int K : c.k_values) {
    if (K < 1) fail("every K must be >= 1");
  }
  if (c.k_err && !(*c.k_err > 0.0)) fail("k_err must be positive");
  if (c.l && *c.l < 1) fail("l must be >= 1");
  for (double a0 : c.a0_values) {
    if (!(a0 > 0.0 && a0 <= 1.0)) fail("a0 must lie in (0, 1]");
  }
  for (double d : c.delta_values) {
    if (!(d > 0.0 && d <= kPi)) fail("delta must lie in (0, pi]");
  }
  for (int n : c.n_eig_values) {
    if (n < 1) fail("n_eig must be >= 1");
  }
  if (c.n_freq && *c.n_freq < 2) fail("n_freq must be >= 2");
  if (c.n_track && *c.n_track < 1) fail("n_track must be >= 1");
  if (c.bootstrap_resamples < 1) fail("bootstrap_resamples must be >= 1");

  const bool bayes = c.estimator == EstimatorKind::bayes;
  const bool multi = c.design == DesignKind::ts_multi_round;
  if (c.scenario != ScenarioKind::depolarizing_study) {
    if (bayes && c.design != DesignKind::bayes_adaptive) {
      fail("the bayes estimator runs on the bayes_adaptive design only");
    }
    if (!bayes && c.design == DesignKind::bayes_adaptive) {
      fail("the time_series estimator needs a ts_single_round or ts_multi_round design");
    }
  }
  if (multi) {
    for (int K : c.k_values) {
      if (K % 2 != 0) fail("the multi-round design needs even K");
    }
    if (c.mode != PronyMode::symmetric) fail("positive_only mode applies to single-round data only");
  }
  switch (c.scenario) {
    case ScenarioKind::two_ev_surface:
    case ScenarioKind::many_ev:
      if (bayes) fail("two_ev_surface and many_ev run the time_series estimator only");
      if (c.scenario == ScenarioKind::many_ev) {
        for (double d : c.delta_values) {
          if (!(c.phi_max > d)) fail("phi_max must exceed every delta");
        }
      }
      break;
    case ScenarioKind::depolarizing_study:
      if (!c.k_err) fail("depolarizing_study needs k_err");
      if (multi) fail("depolarizing_study uses single-round experiments");
      break;
    default:
      break;
  }
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  validate(config);
  ScenarioResult result;
  result.config = config;
  if (config.scenario == ScenarioKind::chi_selftest) {
    result.selftest_passed = chi_selftest(config.seed, result.message);
    return result;
  }
  const auto points = enumerate_points(config);
  const std::size_t jobs = points.size() * static_cast<std::size_t>(config.trials);
  std::vector<std::vector<TrialRecord>> slots(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t point = job / static_cast<std::size_t>(config.trials);
      const int trial = static_cast<int>(job % static_cast<std::size_t>(config.trials));
      try {
        slots[job] = run_job(config, points[point], point, trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto n_threads = static_cast<std::size_t>(config.threads > 0 ? static_cast<unsigned>(config.threads) : hw);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n_threads, jobs); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (auto& slot : slots) {
    for (auto& r : slot) result.records.push_back(std::move(r));
  }
  result.summary = summarize(result.records, config);
  return result;
}

std::vector<SummaryRow> select_series(const ScenarioResult& result, const std::string& series) {
  std::vector<SummaryRow> rows;
  for (const auto& r : result.summary) {
    if (r.series == series) rows.push_back(r);
  }
  return rows;
}

void write_config_header(std::ostream& out, const ScenarioConfig& c) {
  out << std::setprecision(17);
  out << "# scenario = " << to_string(c.scenario) << '\n'
      << "# estimator = " << to_string(c.estimator) << '\n'
      << "# design = " << to_string(c.design) << '\n'
      << "# seed = " << c.seed << '\n'
      << "# trials = " << c.trials << '\n'
      << "# n = " << join(c.n_values) << '\n'
      << "# k = " << join(c.k_values) << '\n'
      << "# k_err = " << (c.k_err ? std::to_string(*c.k_err) : "none") << '\n'
      << "# l = " << (c.l ? std::to_string(*c.l) : "auto") << '\n'
      << "# mode = " << to_string(c.mode) << '\n'
      << "# weighted = " << (c.weighted ? (*c.weighted ? "true" : "false") : "auto") << '\n'

      << "# target = " << (c.target == TargetPolicy::max_amplitude ? "max_amplitude" : "nearest") << '\n'
      << "# a0 = " << join(c.a0_values) << '\n'
      << "# delta = " << join(c.delta_values) << '\n'
      << "# n_eig = " << join(c.n_eig_values) << '\n'
      << "# phi_max = " << c.phi_max << '\n'
      << "# confine = " << (c.confine ? "true" : "false") << '\n'
      << "# n_freq = " << (c.n_freq ? std::to_string(*c.n_freq) : "auto") << '\n'
      << "# n_track = " << (c.n_track ? std::to_string(*c.n_track) : "auto") << '\n'
      << "# prior_sigma = " << c.prior_sigma << '\n'
      << "# random_k = " << (c.random_k ? "true" : "false") << '\n'
      << "# reject_clusters = " << (c.reject_clusters ? "true" : "false") << '\n'
      << "# include_bayes = " << (c.include_bayes ? "true" : "false") << '\n'
      << "# bootstrap_resamples = " << c.bootstrap_resamples << '\n';
}

void write_summary_csv(std::ostream& out, const ScenarioResult& result) {
  write_config_header(out, result.config);
  if (result.config.scenario == ScenarioKind::chi_selftest) {
    out << "# " << result.message << '\n' << "passed\n" << (result.selftest_passed ? 1 : 0) << '\n';
    return;
  }
  out << "series,K,N,a0,delta,n_eig,trials,rejected,mean_error,ci_lower,ci_upper,rms_error,holevo_var,mean_k_tot\n";
  for (const auto& r : result.summary) {
    out << r.series << ',' << r.K << ',' << r.N << ',' << r.a0 << ',' << r.delta << ',' << r.n_eig << ','
        << r.trials << ',' << r.rejected << ',' << r.mean_error << ',' << r.ci_lower << ',' << r.ci_upper
        << ',' << r.rms_error << ',' << r.holevo_var << ',' << r.mean_k_tot << '\n';
  }
}

void write_trials_csv(std::ostream& out, const ScenarioResult& result) {
  write_config_header(out, result.config);
  out << "series,K,N,a0,delta,n_eig,trial,truth,estimate,error,k_tot,rejected\n";
  for (const auto& r : result.records) {
    out << r.series << ',' << r.K << ',' << r.N << ',' << r.a0 << ',' << r.delta << ',' << r.n_eig << ','
        << r.trial << ',' << r.truth << ',' << r.estimate << ',' << r.error << ',' << r.k_tot << ','
        << (r.rejected ? 1 : 0) << '\n';
  }
}

}  // namespace qpe
