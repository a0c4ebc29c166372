#include "qpe/chi.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace qpe {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

void check_args(int k, int hw0, int hw1, int total_k) {
  if (total_k <= 0 || total_k % 2 != 0) throw std::invalid_argument("chi: K must be even and positive");
  const int half = total_k / 2;
  if (k < 0 || k > half) throw std::invalid_argument("chi: k outside 0..K/2");
  if (hw0 < 0 || hw1 < 0 || hw0 > half || hw1 > half) {
    throw std::invalid_argument("chi: Hamming weight outside 0..K/2");
  }
}

std::vector<Wide> binomial_row(int n) {
  std::vector<Wide> row(static_cast<std::size_t>(n) + 1);
  row[0] = 1;
  for (int i = 1; i <= n; ++i) row[i] = row[i - 1] * (n - i + 1) / i;
  return row;
}

// rho[l][w] = E[(-1)^(ones among l fixed positions)] for a uniformly random
// string of length `half` with w ones.
std::vector<std::vector<Wide>> parity_table(int half) {
  std::vector<std::vector<Wide>> choose;
  choose.reserve(half + 1);
  for (int n = 0; n <= half; ++n) choose.push_back(binomial_row(n));
  auto c = [&](int n, int r) -> Wide {
    if (r < 0 || r > n) return Wide(0);
    return choose[n][r];
  };
  std::vector<std::vector<Wide>> rho(half + 1, std::vector<Wide>(half + 1));
  for (int l = 0; l <= half; ++l) {
    for (int w = 0; w <= half; ++w) {
      Wide even = 0;
      for (int p = 0; 2 * p <= l; ++p) even += c(w, 2 * p) * c(half - w, l - 2 * p);
      rho[l][w] = 2 * even / c(half, l) - 1;
    }
  }
  return rho;
}

std::complex<double> combine(int k, int hw0, int hw1, const std::vector<std::vector<Wide>>& rho,
                             const std::vector<Wide>& choose_k) {
  Wide re = 0;
  Wide im = 0;
  for (int l = 0; l <= k; ++l) {
    const Wide term = choose_k[l] * rho[l][hw0] * rho[k - l][hw1];
    switch ((k - l) % 4) {  // (-i)^(k-l)
      case 0: re += term; break;
      case 1: im -= term; break;
      case 2: re -= term; break;
      default: im += term; break;
    }
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

}  // namespace

std::complex<double> chi_oracle(int k, int hw0, int hw1, int total_k) {
  check_args(k, hw0, hw1, total_k);
  if (total_k > 16) throw std::invalid_argument("chi_oracle: K > 16 is not enumerable");
  const int half = total_k / 2;
  std::vector<unsigned> ms;
  std::vector<unsigned> ns;
  for (unsigned s = 0; s < (1u << half); ++s) {
    if (std::popcount(s) == hw0) ms.push_back(s);
    if (std::popcount(s) == hw1) ns.push_back(s);
  }
  std::complex<double> sum = 0.0;
  for (unsigned m : ms) {
    for (unsigned n : ns) {
      std::complex<double> prod = 1.0;
      for (int i = 0; i < k; ++i) {
        const double a = (m >> i) & 1u ? -1.0 : 1.0;
        const double b = (n >> i) & 1u ? -1.0 : 1.0;
        prod *= std::complex<double>(a, -b);
      }
      sum += prod;
    }
  }
  return sum / static_cast<double>(ms.size() * ns.size());
}

std::complex<double> chi_closed_form(int k, int hw0, int hw1, int total_k) {
  check_args(k, hw0, hw1, total_k);
  const auto rho = parity_table(total_k / 2);
  return combine(k, hw0, hw1, rho, binomial_row(k));
}

ChiTable::ChiTable(int total_k) : total_k_(total_k) {
  check_args(0, 0, 0, total_k);
  const int h = total_k / 2;
  const int side = h + 1;
  const auto rho = parity_table(h);
  values_.resize(static_cast<std::size_t>(side) * side * side);
  for (int k = 0; k <= h; ++k) {
    const auto choose_k = binomial_row(k);
    for (int a = 0; a <= h; ++a) {
      for (int b = 0; b <= h; ++b) {
        values_[static_cast<std::size_t>((k * side + a) * side + b)] = combine(k, a, b, rho, choose_k);
      }
    }
  }
}

std::shared_ptr<const ChiTable> ChiTable::shared(int total_k) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ChiTable>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(total_k); it != cache.end()) return it->second;
  }
  // Build outside the lock; a racing builder just loses the insert.
  auto table = std::make_shared<const ChiTable>(total_k);
  std::lock_guard lock(mutex);
  return cache.emplace(total_k, std::move(table)).first->second;
}

namespace {
constexpr char kMagic[8] = {'Q', 'P', 'E', 'C', 'H', 'I', '1', '\0'};
}

void ChiTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write chi table to " + path);
  const std::int32_t k = total_k_;
  const std::uint64_t n = values_.size();
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&k), sizeof k);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(values_.data()),
            static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
  if (!out) throw std::runtime_error("short write of chi table to " + path);
}

ChiTable ChiTable::load(const std::string& path, int total_k) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open chi table " + path);
  char magic[sizeof kMagic];
  std::int32_t k = 0;
  std::uint64_t n = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&k), sizeof k);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error("not a chi table: " + path);
  }
  const std::uint64_t side = static_cast<std::uint64_t>(total_k) / 2 + 1;
  if (k != total_k || n != side * side * side) {
    throw std::runtime_error("chi table " + path + " was written for K=" + std::to_string(k));
  }
  std::vector<std::complex<double>> values(n);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
  if (!in) throw std::runtime_error("truncated chi table " + path);
  return ChiTable(total_k, std::move(values));
}

}  // namespace qpe
