#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qpe/prony.hpp"

namespace qpe {

enum class ScenarioKind { single_ev_scaling, two_ev_surface, many_ev, depolarizing_study, chi_selftest };
enum class EstimatorKind { time_series, bayes };
enum class DesignKind { ts_single_round, ts_multi_round, bayes_adaptive };

const char* to_string(ScenarioKind kind);
const char* to_string(EstimatorKind kind);
const char* to_string(DesignKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);
EstimatorKind estimator_kind_from_string(const std::string& name);
DesignKind design_kind_from_string(const std::string& name);

/// Everything a campaign needs. Sweeps are lists; every combination of the
/// listed values is one point, and each point runs `trials` trials.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::single_ev_scaling;
  EstimatorKind estimator = EstimatorKind::time_series;
  DesignKind design = DesignKind::ts_single_round;

  std::uint64_t seed = 1;
  int trials = 200;
  int threads = 0;  // 0: hardware concurrency

  std::vector<std::uint64_t> n_values{100000};  // experiments (Bayes: checkpoints)
  std::vector<int> k_values{50};                // K, or the adaptive cap for Bayes
  std::optional<double> k_err;                  // depolarizing noise when set

  // Time-series estimator. Unset l: ceil(K/2) in symmetric single-round
  // mode, 1 for multi-round, the library default for positive_only.
  std::optional<int> l;
  PronyMode mode = PronyMode::symmetric;
  std::optional<bool> weighted;  // unset: true for multi-round only
  TargetPolicy target = TargetPolicy::max_amplitude;

  // Spectrum recipes.
  std::vector<double> a0_values{0.5};
  std::vector<double> delta_values{0.5};
  std::vector<int> n_eig_values{10};
  double phi_max = 3.141592653589793;  // many_ev: spurious phases in [delta, phi_max]
  // many_ev with confine = false: spurious phases uniform on the circle and
  // trials binned by their measured target gap, delta_values being the
  // lower bin edges.
  bool confine = true;

  // Bayesian estimator.
  std::optional<int> n_freq;  // unset: min(N_max * cap, 20000)
  std::optional<int> n_track;  // unset: number of eigenvalues in the spectrum
  double prior_sigma = 0.1;
  bool random_k = false;
  bool reject_clusters = true;  // drop multi-eigenvalue runs with a target gap < 0.05

  // depolarizing_study series.
  bool include_bayes = true;

  int bootstrap_resamples = 1000;
};

/// Validates combinations; throws std::invalid_argument naming the problem.
void validate(const ScenarioConfig& config);

/// Per-trial outcome at one sweep point.
struct TrialRecord {
  std::string series;
  int K = 0;
  std::uint64_t N = 0;
  double a0 = 0.0;
  double delta = 0.0;
  int n_eig = 1;
  int trial = 0;
  double truth = 0.0;
  double estimate = 0.0;
  double error = 0.0;
  std::uint64_t k_tot = 0;  // controlled-U applications spent
  bool rejected = false;
};

struct SummaryRow {
  std::string series;
  int K = 0;
  std::uint64_t N = 0;
  double a0 = 0.0;
  double delta = 0.0;
  int n_eig = 1;
  int trials = 0;
  int rejected = 0;
  double mean_error = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double rms_error = 0.0;
  double holevo_var = 0.0;
  double mean_k_tot = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<TrialRecord> records;  // job order: point-major, then trial
  std::vector<SummaryRow> summary;
  bool selftest_passed = true;  // chi_selftest only
  std::string message;
};

/// Runs the campaign on a worker pool. Each (point, trial) job draws from
/// its own RNG stream derived from the seed and writes into its own slot,
/// so results do not depend on the thread count.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Summary rows whose `series` matches, in sweep order.
std::vector<SummaryRow> select_series(const ScenarioResult& result, const std::string& series);

/// "# key = value" lines for every config field.
void write_config_header(std::ostream& out, const ScenarioConfig& config);
/// Header comments, then one row per summary entry.
void write_summary_csv(std::ostream& out, const ScenarioResult& result);
/// Header comments, then one row per trial.
void write_trials_csv(std::ostream& out, const ScenarioResult& result);

}  // namespace qpe
