#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qpe {

/// Gaussian-like belief over the overlaps A_j of the tracked eigenvalues.
/// B is the running estimate (kept on the simplex); H accumulates the
/// Hessian of the log-posterior, starting from -I / prior_sigma^2.
struct AmplitudeBelief {
  Eigen::VectorXd B;
  Eigen::MatrixXd H;
  Eigen::VectorXd prior_mean;
  double prior_sigma = 0.1;
  std::uint64_t skipped = 0;  // steps rejected because B . q <= 0

  /// Prior mean (a0, (1 - a0)/(n - 1), ...) with covariance sigma^2 I.
  /// n = 1 gives the trivial belief B = (1).
  static AmplitudeBelief with_prior(int n, double a0 = 0.5, double sigma = 0.1);
  static AmplitudeBelief with_prior(const Eigen::VectorXd& mean, double sigma);

  int size() const { return static_cast<int>(B.size()); }
};

/// Euclidean projection onto {x : x >= 0, sum x = 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

enum class NewtonResult { updated, skipped };

/// One approximate Newton step on log(B . q): with g = q / (B . q),
/// H <- H - g g^T and B <- simplex(B - Pi H^{-1} g), where Pi removes the
/// all-ones component. Returns `skipped` (belief untouched apart from the
/// counter) when B . q <= 0.
NewtonResult newton_step(AmplitudeBelief& belief, const Eigen::VectorXd& q);

struct MleResult {
  Eigen::VectorXd amplitudes;
  double gradient_norm = 0.0;  // projected-gradient norm at the returned iterate
  int iterations = 0;
  bool converged = false;
};

/// argmax over the simplex of
///   -|A - prior_mean|^2 / (2 sigma^2) + sum_n log(A . q_n)
/// by projected gradient ascent with backtracking, stopped when the
/// projected-gradient norm drops below `tolerance`.
MleResult mle_amplitudes_exact(const std::vector<Eigen::VectorXd>& q_history,
                               const Eigen::VectorXd& prior_mean, double prior_sigma,
                               double tolerance = 1e-8, int max_iterations = 200000);

}  // namespace qpe
