#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qpe/phase.hpp"

namespace qpe {

/// One eigenphase together with the overlap A_j of the starting state.
struct SpectralLine {
  Phase phase;
  double weight = 0.0;
};

/// A discrete eigenphase spectrum: weights are non-negative and sum to one,
/// phases are pairwise distinct. Lines closer than `kMergeTolerance` are
/// merged into one line carrying the summed weight.
class Spectrum {
public:
  static constexpr double kMergeTolerance = 1e-12;
  static constexpr double kWeightTolerance = 1e-12;

  Spectrum() = default;

  /// Validates and merges. Throws std::invalid_argument when a weight is
  /// negative or the weights do not sum to one.
  explicit Spectrum(std::vector<SpectralLine> lines);

  /// Same as the constructor but rescales the weights to sum to one first.
  static Spectrum normalized(std::vector<SpectralLine> lines);

  static Spectrum single(double phase) { return Spectrum({{Phase(phase), 1.0}}); }

  std::span<const SpectralLine> lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }
  bool empty() const { return lines_.empty(); }
  const SpectralLine& operator[](std::size_t i) const { return lines_[i]; }

  /// g(k) = sum_j A_j exp(i k phi_j).
  std::complex<double> signal(int k) const;

  /// Line with the largest weight (ties go to the smaller phase).
  const SpectralLine& dominant() const;

private:
  std::vector<SpectralLine> lines_;
};

/// Plain-text "phase,weight" records, one per line, 17 significant digits.
/// Lines starting with '#' are comments.
void write_spectrum(std::ostream& out, const Spectrum& spectrum);
Spectrum read_spectrum(std::istream& in);
void save_spectrum(const std::string& path, const Spectrum& spectrum);
Spectrum load_spectrum(const std::string& path);

}  // namespace qpe
