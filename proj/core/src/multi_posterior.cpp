#include "qpe/multi_posterior.hpp"

#include <stdexcept>

namespace qpe {

MultiEigPosterior::MultiEigPosterior(const std::vector<FourierPosterior>& marginals,
                                     AmplitudeBelief belief)
    : belief_(std::move(belief)) {
  const int n = static_cast<int>(marginals.size());
  if (n < 1) throw std::invalid_argument("MultiEigPosterior: need at least one marginal");
  if (belief_.size() != n) throw std::invalid_argument("MultiEigPosterior: belief size mismatch");
  std::vector<int> representative;
  class_of_.assign(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < n; ++j) {
    const auto& mj = marginals[static_cast<std::size_t>(j)];
    for (std::size_t c = 0; c < representative.size(); ++c) {
      const int r = representative[c];
      const auto& mr = marginals[static_cast<std::size_t>(r)];
      if (belief_.B(r) == belief_.B(j) && belief_.prior_mean(r) == belief_.prior_mean(j) &&
          mr.n_freq() == mj.n_freq() && mr.coefficients() == mj.coefficients()) {
        class_of_[static_cast<std::size_t>(j)] = static_cast<int>(c);
        break;
      }
    }
    if (class_of_[static_cast<std::size_t>(j)] < 0) {
      class_of_[static_cast<std::size_t>(j)] = static_cast<int>(representative.size());
      representative.push_back(j);
      classes_.push_back(mj);
    }
  }
}

MultiEigPosterior MultiEigPosterior::flat(int n_track, int n_freq, double a0, double prior_sigma) {
  if (n_track < 1) throw std::invalid_argument("MultiEigPosterior: need at least one marginal");
  return MultiEigPosterior(std::vector<FourierPosterior>(static_cast<std::size_t>(n_track),
                                                         FourierPosterior::flat(n_freq)),
                           AmplitudeBelief::with_prior(n_track, a0, prior_sigma));
}

const FourierPosterior& MultiEigPosterior::marginal(int j) const {
  return classes_.at(static_cast<std::size_t>(class_of_.at(static_cast<std::size_t>(j))));
}

std::uint64_t MultiEigPosterior::truncations() const {
  std::uint64_t total = 0;
  for (int c : class_of_) total += classes_[static_cast<std::size_t>(c)].truncations();
  return total;
}

void MultiEigPosterior::update(std::span<const RoundSpec> rounds, std::span<const int> outcomes,
                               const NoiseModel& noise) {
  if (rounds.size() != outcomes.size()) {
    throw std::invalid_argument("update_multi: rounds and outcomes differ in length");
  }
  const int n = size();
  const int n_classes = class_count();
  std::vector<double> q_class(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    q_class[static_cast<std::size_t>(c)] = q_integral(classes_[static_cast<std::size_t>(c)], rounds, outcomes, noise);
  }
  Eigen::VectorXd q(n);
  std::vector<int> first(static_cast<std::size_t>(n_classes), -1);
  for (int j = 0; j < n; ++j) {
    const int c = class_of_[static_cast<std::size_t>(j)];
    q(j) = q_class[static_cast<std::size_t>(c)];
    if (first[static_cast<std::size_t>(c)] < 0) first[static_cast<std::size_t>(c)] = j;
  }
  const double total = belief_.B.dot(q);
  if (!(total > 0.0)) {
    // Truncation ringing can leave the predicted outcome probability
    // non-positive; such an experiment carries no usable update.
    ++skipped_;
    return;
  }

  for (int c = 0; c < n_classes; ++c) {
    auto& post = classes_[static_cast<std::size_t>(c)];
    const double bj = belief_.B(first[static_cast<std::size_t>(c)]);
    const double rest = total - bj * q_class[static_cast<std::size_t>(c)];
    if (rounds.size() == 1) {
      post.mix_likelihood(rest, bj, rounds[0].k, rounds[0].beta, outcomes[0], noise);
    } else {
      FourierPosterior lp = post;
      for (std::size_t r = 0; r < rounds.size(); ++r) {
        lp.multiply_likelihood(rounds[r].k, rounds[r].beta, outcomes[r], noise);
      }
      post.combine(rest, bj, lp);
    }
    post.renormalize();
  }

  newton_step(belief_, q);
  if (n_classes < n) {
    std::vector<double> sum(static_cast<std::size_t>(n_classes), 0.0);
    std::vector<int> count(static_cast<std::size_t>(n_classes), 0);
    for (int j = 0; j < n; ++j) {
      sum[static_cast<std::size_t>(class_of_[static_cast<std::size_t>(j)])] += belief_.B(j);
      ++count[static_cast<std::size_t>(class_of_[static_cast<std::size_t>(j)])];
    }
    for (int j = 0; j < n; ++j) {
      const auto c = static_cast<std::size_t>(class_of_[static_cast<std::size_t>(j)]);
      belief_.B(j) = sum[c] / count[c];
    }
  }
  ++experiments_;
}

void update_multi(MultiEigPosterior& mp, std::span<const RoundSpec> rounds,
                  std::span<const int> outcomes, const NoiseModel& noise) {
  mp.update(rounds, outcomes, noise);
}

bool rejection_check(std::span<const Phase> phases, double threshold) {
  for (std::size_t i = 0; i < phases.size(); ++i) {
    for (std::size_t j = i + 1; j < phases.size(); ++j) {
      if (circular_distance(phases[i], phases[j]) < threshold) return true;
    }
  }
  return false;
}

}  // namespace qpe
