#include "qpe/fourier_posterior.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace qpe {

namespace {

constexpr double kTwoPiInv = 1.0 / kTwoPi;

// |Z_1| below this fraction of Z_0 counts as a vanished first harmonic.
constexpr double kPhasorFloor = 1e-14;

std::complex<double> coeff(const std::vector<std::complex<double>>& z, int band, int n) {
  if (n < 0) return n < -band ? 0.0 : std::conj(z[static_cast<std::size_t>(-n)]);
  return n > band ? 0.0 : z[static_cast<std::size_t>(n)];
}

// out_n = center z_n + a z_{n-k} + conj(a) z_{n+k} for n = 0..min(band + k, cap),
// with z_{-n} = conj z_n and z_n = 0 beyond `band`. Entries of `out` past the
// returned band are left as they were. Returns the new band.
int stencil(const std::vector<std::complex<double>>& in, int band, std::vector<std::complex<double>>& out,
            int cap, int k, double center, std::complex<double> a) {
  const int new_band = std::min(band + k, cap);
  if (out.size() < static_cast<std::size_t>(new_band) + 1) out.resize(static_cast<std::size_t>(new_band) + 1);
  // Products are spelled out: std::complex multiplication goes through the
  // NaN-recovering library path, which dominates the update cost.
  const double ar = a.real();
  const double ai = a.imag();
  const std::complex<double>* z = in.data();
  std::complex<double>* o = out.data();
  for (int n = 0, end = std::min(band, new_band); n <= end; ++n) o[n] = center * z[n];
  for (int n = band + 1; n <= new_band; ++n) o[n] = 0.0;
  for (int n = k; n <= new_band; ++n) {
    const double zr = z[n - k].real();
    const double zi = z[n - k].imag();
    o[n] += std::complex<double>(ar * zr - ai * zi, ar * zi + ai * zr);
  }
  for (int n = std::max(0, k - band); n < k && n <= new_band; ++n) {
    const double zr = z[k - n].real();
    const double zi = -z[k - n].imag();
    o[n] += std::complex<double>(ar * zr - ai * zi, ar * zi + ai * zr);
  }
  for (int n = 0, end = std::min(band - k, new_band); n <= end; ++n) {
    const double zr = z[n + k].real();
    const double zi = z[n + k].imag();
    o[n] += std::complex<double>(ar * zr + ai * zi, ar * zi - ai * zr);
  }
  return new_band;
}

std::complex<double> stencil_weight(int k, double beta, int m, const NoiseModel& noise) {
  if (k < 1) throw std::invalid_argument("posterior update: k must be >= 1");
  if (m != 0 && m != 1) throw std::invalid_argument("posterior update: m must be 0 or 1");
  const double gamma = beta + m * kPi;
  return 0.25 * noise.fidelity(k) * std::polar(1.0, gamma);
}

}  // namespace

FourierPosterior FourierPosterior::flat(int n_freq) {
  if (n_freq < 2) throw std::invalid_argument("FourierPosterior: n_freq must be >= 2");
  FourierPosterior post(n_freq);
  post.z_[0] = kTwoPiInv;
  return post;
}

FourierPosterior FourierPosterior::from_coefficients(std::span<const double> p) {
  if (p.size() < 3 || p.size() % 2 == 0) {
    throw std::invalid_argument("FourierPosterior: coefficient vector must have odd length >= 3");
  }
  const int n_freq = static_cast<int>((p.size() + 1) / 2);
  FourierPosterior post(n_freq);
  post.z_[0] = p[0];
  for (int n = 1; n < n_freq; ++n) {
    const double s = p[static_cast<std::size_t>(2 * n - 1)];
    const double c = p[static_cast<std::size_t>(2 * n)];
    post.z_[static_cast<std::size_t>(n)] = {0.5 * c, -0.5 * s};
    if (s != 0.0 || c != 0.0) post.bandwidth_ = n;
  }
  return post;
}

std::vector<double> FourierPosterior::coefficients() const {
  std::vector<double> p(static_cast<std::size_t>(2 * n_freq() - 1), 0.0);
  p[0] = z_[0].real();
  for (int n = 1; n <= bandwidth_; ++n) {
    p[static_cast<std::size_t>(2 * n - 1)] = -2.0 * z_[static_cast<std::size_t>(n)].imag();
    p[static_cast<std::size_t>(2 * n)] = 2.0 * z_[static_cast<std::size_t>(n)].real();
  }
  return p;
}

std::complex<double> FourierPosterior::z(int n) const { return coeff(z_, bandwidth_, n); }

void FourierPosterior::multiply_likelihood(int k, double beta, int m, const NoiseModel& noise) {
  const auto a = stencil_weight(k, beta, m, noise);
  const int cap = n_freq() - 1;
  if (bandwidth_ + k > cap) ++truncations_;
  thread_local std::vector<std::complex<double>> scratch;
  scratch.resize(z_.size());
  const int band = stencil(z_, bandwidth_, scratch, cap, k, 0.5, a);
  z_.swap(scratch);
  bandwidth_ = band;
}

void FourierPosterior::mix_likelihood(double c, double b, int k, double beta, int m,
                                      const NoiseModel& noise) {
  const auto a = stencil_weight(k, beta, m, noise);
  const int cap = n_freq() - 1;
  if (bandwidth_ + k > cap) ++truncations_;
  thread_local std::vector<std::complex<double>> scratch;
  scratch.resize(z_.size());
  const int band = stencil(z_, bandwidth_, scratch, cap, k, c + 0.5 * b, b * a);
  z_.swap(scratch);
  bandwidth_ = band;
}

void FourierPosterior::renormalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw std::runtime_error("FourierPosterior: posterior mass is not positive");
  }
  scale(1.0 / m);
  z_[0] = kTwoPiInv;
  // Heavy truncation can let the high harmonics grow without bound while
  // the mass stays finite.
  for (int n = 1; n <= bandwidth_; ++n) {
    if (!std::isfinite(std::norm(z_[static_cast<std::size_t>(n)]))) {
      throw std::runtime_error("FourierPosterior: coefficients diverged (n_freq too small for the data)");
    }
  }
}

void FourierPosterior::update(int k, double beta, int m, const NoiseModel& noise) {
  multiply_likelihood(k, beta, m, noise);
  renormalize();
}

double FourierPosterior::mass() const { return kTwoPi * z_[0].real(); }

std::optional<Phase> FourierPosterior::estimate_phase() const {
  const auto z1 = z(1);
  if (std::abs(z1) <= kPhasorFloor * std::abs(z_[0])) return std::nullopt;
  return Phase(std::arg(std::conj(z1)));  // arg(p2 + i p1)
}

double FourierPosterior::holevo_var() const {
  const auto z1 = z(1);
  if (std::abs(z1) <= kPhasorFloor * std::abs(z_[0])) return std::numeric_limits<double>::infinity();
  // p1 = -2 Im Z_1, p2 = 2 Re Z_1.
  return 1.0 / (kPi * kPi * 4.0 * std::norm(z1)) - 1.0;
}

double FourierPosterior::density(double phase) const {
  double d = z_[0].real();
  const std::complex<double> step = std::polar(1.0, phase);
  std::complex<double> e = step;
  for (int n = 1; n <= bandwidth_; ++n) {
    d += 2.0 * (z_[static_cast<std::size_t>(n)] * e).real();
    e *= step;
  }
  return d;
}

std::vector<double> FourierPosterior::density_grid(int points) const {
  if (points < 1) throw std::invalid_argument("density_grid: need at least one point");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = density(-kPi + kTwoPi * i / points);
  }
  return out;
}

double FourierPosterior::min_density(int points) const {
  const auto grid = density_grid(points);
  return *std::min_element(grid.begin(), grid.end());
}

void FourierPosterior::scale(double factor) {
  for (int n = 0; n <= bandwidth_; ++n) z_[static_cast<std::size_t>(n)] *= factor;
}

void FourierPosterior::combine(double a, double b, const FourierPosterior& other) {
  if (other.n_freq() != n_freq()) throw std::invalid_argument("combine: n_freq mismatch");
  const int band = std::max(bandwidth_, other.bandwidth_);
  for (int n = 0; n <= band; ++n) {
    auto& v = z_[static_cast<std::size_t>(n)];
    const auto mine = n <= bandwidth_ ? v : std::complex<double>(0.0);
    v = a * mine + b * other.z(n);
  }
  bandwidth_ = band;
  truncations_ = std::max(truncations_, other.truncations_);
}

FourierPosterior init_flat(int n_freq) { return FourierPosterior::flat(n_freq); }

FourierPosterior update_single(FourierPosterior post, int k, double beta, int m, const NoiseModel& noise) {
  post.update(k, beta, m, noise);
  return post;
}

double q_integral(const FourierPosterior& post, std::span<const RoundSpec> rounds,
                  std::span<const int> outcomes, const NoiseModel& noise) {
  if (rounds.size() != outcomes.size()) {
    throw std::invalid_argument("q_integral: rounds and outcomes differ in length");
  }
  if (rounds.empty()) return post.mass();
  if (rounds.size() == 1) {
    // Only the k-th harmonic survives the integral.
    const auto a = stencil_weight(rounds[0].k, rounds[0].beta, outcomes[0], noise);
    const auto zk = post.z(rounds[0].k);
    return kTwoPi * (0.5 * post.z(0).real() + 2.0 * (std::conj(a) * zk).real());
  }
  // Exact product without truncation; only Z_0 of the result is needed.
  int band = post.bandwidth();
  std::vector<std::complex<double>> cur(static_cast<std::size_t>(band) + 1);
  for (int n = 0; n <= band; ++n) cur[static_cast<std::size_t>(n)] = post.z(n);
  std::vector<std::complex<double>> next;
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    const auto a = stencil_weight(rounds[r].k, rounds[r].beta, outcomes[r], noise);
    band = stencil(cur, band, next, std::numeric_limits<int>::max() / 2, rounds[r].k, 0.5, a);
    cur.swap(next);
  }
  return kTwoPi * cur[0].real();
}

MMatrices m_matrices(int k, int n_freq) {
  if (k < 1 || n_freq < 2) throw std::invalid_argument("m_matrices: need k >= 1 and n_freq >= 2");
  const int size = 2 * n_freq - 1;
  std::vector<Eigen::Triplet<double>> t0;
  std::vector<Eigen::Triplet<double>> t1;
  enum Kind { kSin, kCos };
  // Adds coef * (sin|cos)(f phi) to column `col`, folding negative f.
  auto add = [&](std::vector<Eigen::Triplet<double>>& t, int col, Kind kind, int f, double coef) {
    if (f < 0) {
      f = -f;
      if (kind == kSin) coef = -coef;
    }
    if (f >= n_freq) return;
    if (f == 0) {
      if (kind == kCos) t.emplace_back(0, col, coef);
      return;
    }
    t.emplace_back(kind == kSin ? 2 * f - 1 : 2 * f, col, coef);
  };
  for (int col = 0; col < size; ++col) {
    const int n = (col + 1) / 2;
    const Kind kind = (col == 0 || col % 2 == 0) ? kCos : kSin;
    if (kind == kSin) {
      add(t0, col, kSin, n + k, 1.0);
      add(t0, col, kSin, n - k, 1.0);
      add(t1, col, kCos, n + k, 1.0);
      add(t1, col, kCos, n - k, -1.0);
    } else {
      add(t0, col, kCos, n + k, 1.0);
      add(t0, col, kCos, n - k, 1.0);
      add(t1, col, kSin, n + k, -1.0);
      add(t1, col, kSin, n - k, 1.0);
    }
  }
  MMatrices m;
  m.m0.resize(size, size);
  m.m1.resize(size, size);
  m.m0.setFromTriplets(t0.begin(), t0.end());
  m.m1.setFromTriplets(t1.begin(), t1.end());
  return m;
}

void write_posterior_csv(std::ostream& out, const FourierPosterior& post) {
  out << std::setprecision(17) << "index,coefficient\n";
  const auto p = post.coefficients();
  for (std::size_t i = 0; i < p.size(); ++i) out << i << ',' << p[i] << '\n';
}

void write_density_csv(std::ostream& out, const FourierPosterior& post, int points) {
  out << std::setprecision(17) << "phase,density\n";
  const auto grid = post.density_grid(points);
  for (int i = 0; i < points; ++i) {
    out << -kPi + kTwoPi * i / points << ',' << grid[static_cast<std::size_t>(i)] << '\n';
  }
}

}  // namespace qpe
