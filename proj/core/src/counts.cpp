#include "qpe/counts.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpe {

AggregatedCounts AggregatedCounts::multi_round(int total_k) {
  if (total_k <= 0 || total_k % 2 != 0) {
    throw std::invalid_argument("multi-round counts need an even, positive K");
  }
  return AggregatedCounts(CountsMode::multi_round, total_k);
}

void AggregatedCounts::add_single(int k, double beta, int m, std::uint64_t count) {
  if (mode_ != CountsMode::single_round) {
    throw std::invalid_argument("add_single on multi-round counts");
  }
  if (k < 1 || (m != 0 && m != 1)) throw std::invalid_argument("add_single: bad key");
  single_[{k, beta, m}] += count;
  single_shots_[{k, beta}] += count;
}

void AggregatedCounts::add_multi(int hw0, int hw1, std::uint64_t count) {
  if (mode_ != CountsMode::multi_round) {
    throw std::invalid_argument("add_multi on single-round counts");
  }
  const int half = design_k_ / 2;
  if (hw0 < 0 || hw1 < 0 || hw0 > half || hw1 > half) {
    throw std::invalid_argument("add_multi: Hamming weight out of range");
  }
  multi_[{hw0, hw1}] += count;
  multi_shots_ += count;
}

std::uint64_t AggregatedCounts::single_count(int k, double beta, int m) const {
  const auto it = single_.find({k, beta, m});
  return it == single_.end() ? 0 : it->second;
}

std::uint64_t AggregatedCounts::shots(int k, double beta) const {
  const auto it = single_shots_.find({k, beta});
  return it == single_shots_.end() ? 0 : it->second;
}

std::uint64_t AggregatedCounts::multi_count(int hw0, int hw1) const {
  const auto it = multi_.find({hw0, hw1});
  return it == multi_.end() ? 0 : it->second;
}

int AggregatedCounts::max_k() const {
  int k = 0;
  for (const auto& [key, count] : single_shots_) {
    if (count > 0) k = std::max(k, key.first);
  }
  return k;
}

std::uint64_t AggregatedCounts::experiments() const {
  if (mode_ == CountsMode::multi_round) return multi_shots_;
  std::uint64_t n = 0;
  for (const auto& [key, count] : single_shots_) n += count;
  return n;
}

std::uint64_t AggregatedCounts::total_applications() const {
  if (mode_ == CountsMode::multi_round) {
    return multi_shots_ * static_cast<std::uint64_t>(design_k_);
  }
  std::uint64_t total = 0;
  for (const auto& [key, count] : single_shots_) {
    total += count * static_cast<std::uint64_t>(key.first);
  }
  return total;
}

AggregatedCounts& AggregatedCounts::operator+=(const AggregatedCounts& other) {
  if (other.empty()) return *this;
  if (mode_ != other.mode_ || design_k_ != other.design_k_) {
    throw std::invalid_argument("cannot merge counts of different modes or K");
  }
  for (const auto& [key, count] : other.single_) single_[key] += count;
  for (const auto& [key, count] : other.single_shots_) single_shots_[key] += count;
  for (const auto& [key, count] : other.multi_) multi_[key] += count;
  multi_shots_ += other.multi_shots_;
  return *this;
}

void write_counts_csv(std::ostream& out, const AggregatedCounts& counts) {
  out << std::setprecision(17);
  if (counts.mode() == CountsMode::single_round) {
    out << "k,beta,m,count,shots\n";
    for (const auto& [key, count] : counts.single_tallies()) {
      const auto& [k, beta, m] = key;
      out << k << ',' << beta << ',' << m << ',' << count << ',' << counts.shots(k, beta) << '\n';
    }
  } else {
    out << "K,hw0,hw1,count,shots\n";
    for (const auto& [key, count] : counts.multi_tallies()) {
      out << counts.design_k() << ',' << key.first << ',' << key.second << ',' << count << ','
          << counts.multi_shots() << '\n';
    }
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& row) {
  std::vector<std::string> fields;
  std::stringstream ss(row);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

bool is_comment_or_blank(const std::string& row) {
  const auto first = row.find_first_not_of(" \t\r");
  return first == std::string::npos || row[first] == '#';
}

}  // namespace

AggregatedCounts read_counts_csv(std::istream& in) {
  std::string row;
  std::string header;
  while (std::getline(in, row)) {
    if (!is_comment_or_blank(row)) {
      header = row;
      break;
    }
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const bool single = header == "k,beta,m,count,shots";
  if (!single && header != "K,hw0,hw1,count,shots") {
    throw std::runtime_error("counts csv: unrecognised header '" + header + "'");
  }

  std::vector<std::vector<std::string>> records;
  while (std::getline(in, row)) {
    if (is_comment_or_blank(row)) continue;
    auto fields = split_csv(row);
    if (fields.size() != 5) throw std::runtime_error("counts csv: expected 5 columns: " + row);
    records.push_back(std::move(fields));
  }

  if (single) {
    auto counts = AggregatedCounts::single_round();
    for (const auto& f : records) {
      counts.add_single(std::stoi(f[0]), std::stod(f[1]), std::stoi(f[2]), std::stoull(f[3]));
    }
    return counts;
  }
  if (records.empty()) throw std::runtime_error("counts csv: multi-round file without records");
  auto counts = AggregatedCounts::multi_round(std::stoi(records.front()[0]));
  for (const auto& f : records) {
    if (std::stoi(f[0]) != counts.design_k()) {
      throw std::runtime_error("counts csv: mixed K in multi-round file");
    }
    counts.add_multi(std::stoi(f[1]), std::stoi(f[2]), std::stoull(f[3]));
  }
  return counts;
}

}  // namespace qpe
