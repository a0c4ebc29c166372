#include "qpe/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qpe {

namespace {

void check_weights(const std::vector<SpectralLine>& lines) {
  for (const auto& line : lines) {
    if (!std::isfinite(line.weight) || line.weight < 0.0) {
      throw std::invalid_argument("Spectrum: weights must be finite and non-negative");
    }
  }
}

double total_weight(const std::vector<SpectralLine>& lines) {
  return std::accumulate(lines.begin(), lines.end(), 0.0,
                         [](double acc, const SpectralLine& l) { return acc + l.weight; });
}

std::vector<SpectralLine> merge_degenerate(std::vector<SpectralLine> lines) {
  std::sort(lines.begin(), lines.end(),
            [](const SpectralLine& a, const SpectralLine& b) { return a.phase < b.phase; });
  std::vector<SpectralLine> merged;
  merged.reserve(lines.size());
  for (const auto& line : lines) {
    if (!merged.empty() &&
        circular_distance(merged.back().phase, line.phase) < Spectrum::kMergeTolerance) {
      merged.back().weight += line.weight;
    } else {
      merged.push_back(line);
    }
  }
  // Lines just below pi coincide with lines at -pi.
  if (merged.size() > 1 &&
      circular_distance(merged.front().phase, merged.back().phase) < Spectrum::kMergeTolerance) {
    merged.front().weight += merged.back().weight;
    merged.pop_back();
  }
  return merged;
}

}  // namespace

Spectrum::Spectrum(std::vector<SpectralLine> lines) {
  if (lines.empty()) throw std::invalid_argument("Spectrum: no lines");
  check_weights(lines);
  const double total = total_weight(lines);
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("Spectrum: weights sum to " + std::to_string(total) +
                                ", expected 1");
  }
  lines_ = merge_degenerate(std::move(lines));
}

Spectrum Spectrum::normalized(std::vector<SpectralLine> lines) {
  if (lines.empty()) throw std::invalid_argument("Spectrum: no lines");
  check_weights(lines);
  const double total = total_weight(lines);
  if (total <= 0.0) throw std::invalid_argument("Spectrum: total weight is zero");
  for (auto& line : lines) line.weight /= total;
  Spectrum s;
  s.lines_ = merge_degenerate(std::move(lines));
  return s;
}

std::complex<double> Spectrum::signal(int k) const {
  std::complex<double> g{0.0, 0.0};
  for (const auto& line : lines_) {
    g += line.weight * std::polar(1.0, k * line.phase.radians());
  }
  return g;
}

const SpectralLine& Spectrum::dominant() const {
  if (lines_.empty()) throw std::logic_error("Spectrum::dominant on empty spectrum");
  // lines_ is sorted by phase, so the first maximum has the smaller phase.
  return *std::max_element(lines_.begin(), lines_.end(),
                           [](const SpectralLine& a, const SpectralLine& b) {
                             return a.weight < b.weight;
                           });
}

void write_spectrum(std::ostream& out, const Spectrum& spectrum) {
  out << std::setprecision(17);
  for (const auto& line : spectrum.lines()) {
    out << line.phase.radians() << ',' << line.weight << '\n';
  }
}

Spectrum read_spectrum(std::istream& in) {
  std::vector<SpectralLine> lines;
  std::string row;
  int lineno = 0;
  while (std::getline(in, row)) {
    ++lineno;
    const auto first = row.find_first_not_of(" \t\r");
    if (first == std::string::npos || row[first] == '#') continue;
    std::istringstream fields(row);
    double phase = 0.0;
    double weight = 0.0;
    char comma = 0;
    if (!(fields >> phase >> comma >> weight) || comma != ',') {
      throw std::runtime_error("spectrum: malformed record on line " + std::to_string(lineno));
    }
    lines.push_back({Phase(phase), weight});
  }
  return Spectrum(std::move(lines));
}

void save_spectrum(const std::string& path, const Spectrum& spectrum) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_spectrum(out, spectrum);
}

Spectrum load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_spectrum(in);
}

}  // namespace qpe
