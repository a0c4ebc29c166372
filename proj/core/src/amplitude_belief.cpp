#include "qpe/amplitude_belief.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace qpe {

AmplitudeBelief AmplitudeBelief::with_prior(int n, double a0, double sigma) {
  if (n < 1) throw std::invalid_argument("AmplitudeBelief: need at least one component");
  Eigen::VectorXd mean(n);
  if (n == 1) {
    mean(0) = 1.0;
  } else {
    if (!(a0 >= 0.0 && a0 <= 1.0)) throw std::invalid_argument("AmplitudeBelief: a0 outside [0, 1]");
    mean.setConstant((1.0 - a0) / (n - 1));
    mean(0) = a0;
  }
  return with_prior(mean, sigma);
}

AmplitudeBelief AmplitudeBelief::with_prior(const Eigen::VectorXd& mean, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("AmplitudeBelief: prior sigma must be > 0");
  AmplitudeBelief b;
  b.prior_mean = mean;
  b.B = project_simplex(mean);
  b.prior_sigma = sigma;
  b.H = -Eigen::MatrixXd::Identity(mean.size(), mean.size()) / (sigma * sigma);
  return b;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n == 0) return v;
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += u[static_cast<std::size_t>(i)];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
  }
  Eigen::VectorXd x = (v.array() - theta).cwiseMax(0.0);
  // Remove the rounding residue so that sum x == 1 to the last bit possible.
  const double total = x.sum();
  if (total > 0.0) x /= total;
  return x;
}

NewtonResult newton_step(AmplitudeBelief& belief, const Eigen::VectorXd& q) {
  if (q.size() != belief.B.size()) throw std::invalid_argument("newton_step: size mismatch");
  const double bq = belief.B.dot(q);
  if (!(bq > 0.0)) {
    ++belief.skipped;
    return NewtonResult::skipped;
  }
  const Eigen::VectorXd g = q / bq;
  belief.H -= g * g.transpose();
  // Newton step restricted to the plane sum B = 1: gradient and Hessian are
  // both projected with Pi = I - 1 1^T / n, and the all-ones direction is
  // given unit curvature so the reduced system stays invertible. Projecting
  // only the step lets the all-ones part of g (B . g = 1) leak into the
  // plane through H^{-1} and drives B towards a vertex.
  const auto n = belief.B.size();
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd pi = Eigen::MatrixXd::Identity(n, n) - ones;
  const Eigen::MatrixXd reduced = pi * (-belief.H) * pi + ones;
  const Eigen::VectorXd step = pi * reduced.ldlt().solve(pi * g);
  belief.B = project_simplex(belief.B + step);
  return NewtonResult::updated;
}

namespace {

double objective(const Eigen::VectorXd& a, const std::vector<Eigen::VectorXd>& qs,
                 const Eigen::VectorXd& mean, double inv_var) {
  double f = -0.5 * inv_var * (a - mean).squaredNorm();
  for (const auto& q : qs) {
    const double aq = a.dot(q);
    if (!(aq > 0.0)) return -std::numeric_limits<double>::infinity();
    f += std::log(aq);
  }
  return f;
}

Eigen::VectorXd gradient(const Eigen::VectorXd& a, const std::vector<Eigen::VectorXd>& qs,
                         const Eigen::VectorXd& mean, double inv_var) {
  Eigen::VectorXd g = -inv_var * (a - mean);
  for (const auto& q : qs) g += q / a.dot(q);
  return g;
}

}  // namespace

MleResult mle_amplitudes_exact(const std::vector<Eigen::VectorXd>& q_history,
                               const Eigen::VectorXd& prior_mean, double prior_sigma, double tolerance,
                               int max_iterations) {
  if (!(prior_sigma > 0.0)) throw std::invalid_argument("mle_amplitudes_exact: sigma must be > 0");
  const double inv_var = 1.0 / (prior_sigma * prior_sigma);
  // The stopping test uses the gradient mapping at the fixed step sigma^2,
  // the inverse curvature of the prior.
  const double probe = 1.0 / inv_var;

  MleResult res;
  Eigen::VectorXd a = project_simplex(prior_mean);
  // Start strictly inside so every log term is finite.
  a = 0.999 * a + 0.001 * Eigen::VectorXd::Constant(a.size(), 1.0 / static_cast<double>(a.size()));
  double f = objective(a, q_history, prior_mean, inv_var);
  double step = probe;
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    const Eigen::VectorXd g = gradient(a, q_history, prior_mean, inv_var);
    res.gradient_norm = (project_simplex(a + probe * g) - a).norm() / probe;
    if (res.gradient_norm < tolerance) {
      res.converged = true;
      break;
    }
    step *= 2.0;
    Eigen::VectorXd next;
    double f_next = 0.0;
    for (;;) {
      next = project_simplex(a + step * g);
      f_next = objective(next, q_history, prior_mean, inv_var);
      // Armijo condition along the projection arc. Near the optimum the
      // objective change drops below its rounding error; the objective is
      // concave, so a non-negative slope at `next` along the segment from `a`
      // also guarantees f(next) >= f(a).
      if (f_next >= f + 1e-4 * g.dot(next - a)) break;
      if (gradient(next, q_history, prior_mean, inv_var).dot(next - a) >= 0.0) break;
      step *= 0.5;
      if (step < 1e-300) break;
    }
    if (step < 1e-300 || (next - a).norm() == 0.0) {
      res.gradient_norm = (project_simplex(a + probe * g) - a).norm() / probe;
      res.converged = res.gradient_norm < tolerance;
      break;
    }
    a = next;
    f = f_next;
  }
  res.amplitudes = a;
  return res;
}

}  // namespace qpe
