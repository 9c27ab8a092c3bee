#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "coclust/detail/matrix.hpp"

namespace coclust {

/// Class-count vector over a population of `total` nodes. Proportions
/// counts/total lie in the quantized simplex with resolution 1/total.
class ClassCounts {
 public:
  ClassCounts() = default;
  explicit ClassCounts(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("ClassCounts: need at least one class");
    total_ = std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
    if (total_ == 0) throw std::invalid_argument("ClassCounts: total must be positive");
  }

  std::size_t num_classes() const noexcept { return counts_.size(); }
  std::size_t total() const noexcept { return total_; }
  std::size_t operator[](std::size_t a) const noexcept { return counts_[a]; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }

  double proportion(std::size_t a) const noexcept {
    return static_cast<double>(counts_[a]) / static_cast<double>(total_);
  }
  std::vector<double> proportions() const {
    std::vector<double> p(counts_.size());
    for (std::size_t a = 0; a < p.size(); ++a) p[a] = proportion(a);
    return p;
  }

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;

 private:
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

/// Node-to-class assignment. Classes are 0-based internally; text formats
/// use 1-based ids.
class Labeling {
 public:
  Labeling() = default;
  Labeling(std::vector<int> labels, std::size_t num_classes)
      : labels_(std::move(labels)), num_classes_(num_classes) {
    if (labels_.empty()) throw std::invalid_argument("Labeling: empty");
    if (num_classes_ == 0) throw std::invalid_argument("Labeling: K must be >= 1");
    for (int c : labels_)
      if (c < 0 || static_cast<std::size_t>(c) >= num_classes_)
        throw std::invalid_argument("Labeling: label " + std::to_string(c) + " outside [0, K)");
  }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  int operator[](std::size_t i) const noexcept { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Unchecked write; callers keep labels within [0, K).
  void set(std::size_t i, int c) noexcept { labels_[i] = c; }

  ClassCounts counts() const {
    std::vector<std::size_t> c(num_classes_, 0);
    for (int l : labels_) ++c[static_cast<std::size_t>(l)];
    return ClassCounts(std::move(c));
  }

  friend bool operator==(const Labeling&, const Labeling&) = default;

 private:
  std::vector<int> labels_;
  std::size_t num_classes_ = 0;
};

/// Membership of a labeling in Q_mu: its class counts equal mu exactly.
inline bool respects(const Labeling& s, const ClassCounts& mu) { return s.counts() == mu; }

/// Labeling with the given counts, classes laid out in ascending order.
inline Labeling sorted_labeling(const ClassCounts& counts) {
  std::vector<int> labels;
  labels.reserve(counts.total());
  for (std::size_t a = 0; a < counts.num_classes(); ++a)
    labels.insert(labels.end(), counts[a], static_cast<int>(a));
  return Labeling(std::move(labels), counts.num_classes());
}

/// K x K direction with entries in [-1, 1].
class Direction {
 public:
  explicit Direction(RealMatrix gamma) : gamma_(std::move(gamma)) {
    if (gamma_.rows() != gamma_.cols() || gamma_.empty())
      throw std::invalid_argument("Direction: must be square and nonempty");
    for (double g : gamma_.data())
      if (!(std::abs(g) <= 1.0)) throw std::invalid_argument("Direction: entries must lie in [-1, 1]");
  }

  static Direction identity(std::size_t k) {
    RealMatrix g(k, k, 0.0);
    for (std::size_t a = 0; a < k; ++a) g(a, a) = 1.0;
    return Direction(std::move(g));
  }
  static Direction ones(std::size_t k) { return Direction(RealMatrix(k, k, 1.0)); }

  std::size_t num_classes() const noexcept { return gamma_.rows(); }
  const RealMatrix& matrix() const noexcept { return gamma_; }
  operator const RealMatrix&() const noexcept { return gamma_; }

 private:
  RealMatrix gamma_;
};

/// Co-blockmodel parameters (mu, nu, theta).
struct CoBlockParams {
  ClassCounts mu;
  ClassCounts nu;
  RealMatrix theta;

  CoBlockParams() = default;
  CoBlockParams(ClassCounts mu_in, ClassCounts nu_in, RealMatrix theta_in)
      : mu(std::move(mu_in)), nu(std::move(nu_in)), theta(std::move(theta_in)) {
    if (theta.rows() != mu.num_classes() || theta.cols() != nu.num_classes())
      throw std::invalid_argument("CoBlockParams: theta shape does not match class counts");
    for (double t : theta.data())
      if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("CoBlockParams: theta entries must lie in [0, 1]");
  }

  std::size_t num_row_classes() const noexcept { return mu.num_classes(); }
  std::size_t num_col_classes() const noexcept { return nu.num_classes(); }
};

}  // namespace coclust
