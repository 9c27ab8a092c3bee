#pragma once

// Block summaries A/ST and omega/sigma tau, Hamming distances, exact
// per-side label assignment, and support functions of the sets of
// admissible co-clusterings.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "coclust/detail/bit_matrix.hpp"
#include "coclust/detail/error.hpp"
#include "coclust/detail/matrix.hpp"
#include "coclust/detail/min_cost_flow.hpp"
#include "coclust/detail/rng.hpp"
#include "coclust/kernels.hpp"
#include "coclust/partition.hpp"
#include "coclust/types.hpp"

namespace coclust {

/// Per-block mass (fraction of the whole array or of the unit square), class
/// proportions, and block means mass_ab / (mu_a nu_b) with 0/0 -> 0.
struct BlockSummary {
  RealMatrix mass;
  std::vector<double> row_proportions;
  std::vector<double> col_proportions;
  RealMatrix means;

  double total_mass() const {
    double t = 0.0;
    for (double v : mass.data()) t += v;
    return t;
  }
};

namespace detail {

inline void check_shape(const BinaryMatrix& a, const Labeling& s, const Labeling& t) {
  if (a.rows() != s.size() || a.cols() != t.size())
    throw std::invalid_argument("array is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " but labelings have lengths " + std::to_string(s.size()) + " and " +
                                std::to_string(t.size()));
}

inline RealMatrix means_from(const RealMatrix& mass, const std::vector<double>& mu, const std::vector<double>& nu) {
  RealMatrix means(mass.rows(), mass.cols(), 0.0);
  for (std::size_t a = 0; a < mass.rows(); ++a)
    for (std::size_t b = 0; b < mass.cols(); ++b) {
      const double size = mu[a] * nu[b];
      means(a, b) = size > 0.0 ? mass(a, b) / size : 0.0;
    }
  return means;
}

/// Integer edge counts per block.
inline Matrix<std::int64_t> block_edge_counts(const BinaryMatrix& a, const Labeling& s, const Labeling& t) {
  Matrix<std::int64_t> counts(s.num_classes(), t.num_classes(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto si = static_cast<std::size_t>(s[i]);
    const auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (row[j]) ++counts(si, static_cast<std::size_t>(t[j]));
  }
  return counts;
}

/// <Gamma, A/ST> from integer block counts.
inline double inner_from_counts(const RealMatrix& gamma, const Matrix<std::int64_t>& counts, double cells) {
  double acc = 0.0;
  for (std::size_t a = 0; a < counts.rows(); ++a)
    for (std::size_t b = 0; b < counts.cols(); ++b) acc += gamma(a, b) * static_cast<double>(counts(a, b));
  return acc / cells;
}

}  // namespace detail

/// Empirical co-clustering summary A/ST.
inline BlockSummary block_summary(const BinaryMatrix& a, const Labeling& s, const Labeling& t) {
  detail::check_shape(a, s, t);
  const double cells = static_cast<double>(a.rows() * a.cols());
  const auto counts = detail::block_edge_counts(a, s, t);
  BlockSummary out;
  out.mass = RealMatrix(counts.rows(), counts.cols());
  for (std::size_t k = 0; k < counts.size(); ++k) out.mass.data()[k] = static_cast<double>(counts.data()[k]) / cells;
  out.row_proportions = s.counts().proportions();
  out.col_proportions = t.counts().proportions();
  out.means = detail::means_from(out.mass, out.row_proportions, out.col_proportions);
  return out;
}

/// <Gamma, A/ST>.
inline double support_inner(const BinaryMatrix& a, const Labeling& s, const Labeling& t, const RealMatrix& gamma) {
  detail::check_shape(a, s, t);
  if (gamma.rows() != s.num_classes() || gamma.cols() != t.num_classes())
    throw std::invalid_argument("direction shape does not match class counts");
  return detail::inner_from_counts(gamma, detail::block_edge_counts(a, s, t),
                                   static_cast<double>(a.rows() * a.cols()));
}

/// Number of positions at which two labelings differ.
inline std::size_t hamming_count(const Labeling& s, const Labeling& s2) {
  if (s.size() != s2.size()) throw std::invalid_argument("hamming: labelings have different lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < s.size(); ++i) d += s[i] != s2[i];
  return d;
}

/// Fraction of positions at which two labelings differ.
inline double hamming_normalized(const Labeling& s, const Labeling& s2) {
  return static_cast<double>(hamming_count(s, s2)) / static_cast<double>(s.size());
}

/// Returns the labeling maximizing sum_i cost(i, S(i)) among labelings with
/// the given class counts.
///
/// K = 2 sorts rows by cost(i,0) - cost(i,1); K > 2 solves the equivalent
/// transportation problem by min-cost flow. Ties resolve lowest row index to
/// lowest class id.
inline Labeling assign_side(const RealMatrix& cost, const ClassCounts& counts) {
  const std::size_t m = cost.rows();
  const std::size_t k = cost.cols();
  if (counts.num_classes() != k) throw std::invalid_argument("assign_side: cost columns must equal class count");
  if (counts.total() != m)
    throw std::invalid_argument("assign_side: infeasible class counts (total " + std::to_string(counts.total()) +
                                " for " + std::to_string(m) + " rows)");
  std::vector<int> labels(m, 0);
  if (k == 1) return Labeling(std::move(labels), 1);

  if (k == 2) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return cost(x, 0) - cost(x, 1) > cost(y, 0) - cost(y, 1);
    });
    for (std::size_t r = counts[0]; r < m; ++r) labels[order[r]] = 1;
    return Labeling(std::move(labels), 2);
  }

  // source = 0, rows = 1..m, classes = m+1..m+k, sink = m+k+1
  detail::MinCostFlow flow(m + k + 2);
  const std::size_t sink = m + k + 1;
  std::vector<std::size_t> edge_base(m);
  for (std::size_t i = 0; i < m; ++i) {
    flow.add_edge(0, 1 + i, 1, 0.0);
    edge_base[i] = flow.graph()[1 + i].size();
    for (std::size_t c = 0; c < k; ++c) flow.add_edge(1 + i, 1 + m + c, 1, -cost(i, c));
  }
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c] > 0) flow.add_edge(1 + m + c, sink, static_cast<long>(counts[c]), 0.0);
  const auto [pushed, unused] = flow.solve(0, sink, static_cast<long>(m));
  if (pushed != static_cast<long>(m)) throw std::invalid_argument("assign_side: infeasible class counts");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < k; ++c)
      if (flow.graph()[1 + i][edge_base[i] + c].cap == 0) labels[i] = static_cast<int>(c);

  // Tie canonicalization: move the smallest swappable class id forward
  // whenever the exchange does not lower the objective.
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t best = m;
    for (std::size_t j = i + 1; j < m; ++j) {
      if (labels[j] >= labels[i]) continue;
      if (best != m && labels[j] >= labels[best]) continue;
      const auto li = static_cast<std::size_t>(labels[i]);
      const auto lj = static_cast<std::size_t>(labels[j]);
      if (cost(i, lj) + cost(j, li) >= cost(i, li) + cost(j, lj)) best = j;
    }
    if (best != m) std::swap(labels[i], labels[best]);
  }
  return Labeling(std::move(labels), k);
}

struct SupportResult {
  double value = 0.0;
  Labeling s;
  Labeling t;
};

enum class SupportMethod { kExact, kAlternating };

struct SupportOptions {
  SupportMethod method = SupportMethod::kAlternating;
  std::size_t restarts = 32;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kExactSupportCap = 10;

namespace detail {

inline void check_support_inputs(const BinaryMatrix& a, const ClassCounts& mu, const ClassCounts& nu,
                                 const RealMatrix& gamma) {
  if (mu.total() != a.rows() || nu.total() != a.cols())
    throw std::invalid_argument("support: class counts do not match array dimensions");
  if (gamma.rows() != mu.num_classes() || gamma.cols() != nu.num_classes())
    throw std::invalid_argument("support: direction shape does not match class counts");
}

inline SupportResult support_exact(const BinaryMatrix& a, const ClassCounts& mu, const ClassCounts& nu,
                                   const RealMatrix& gamma) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m > kExactSupportCap || n > kExactSupportCap)
    throw UnsupportedError("support_empirical: exact enumeration is capped at " +
                           std::to_string(kExactSupportCap) + " rows and columns");
  const std::size_t kr = mu.num_classes(), kc = nu.num_classes();
  std::vector<int> s = sorted_labeling(mu).labels();
  const std::vector<int> t0 = sorted_labeling(nu).labels();
  SupportResult best;
  bool have = false;
  Matrix<std::int64_t> row_class_sums(kr, n);
  std::vector<double> col_value(kc * n);
  do {
    std::fill(row_class_sums.data().begin(), row_class_sums.data().end(), 0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) row_class_sums(static_cast<std::size_t>(s[i]), j) += a(i, j);
    for (std::size_t b = 0; b < kc; ++b)
      for (std::size_t j = 0; j < n; ++j) {
        double v = 0.0;
        for (std::size_t r = 0; r < kr; ++r) v += gamma(r, b) * static_cast<double>(row_class_sums(r, j));
        col_value[b * n + j] = v;
      }
    std::vector<int> t = t0;
    do {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += col_value[static_cast<std::size_t>(t[j]) * n + j];
      if (!have || v > best.value) {
        best.value = v;
        best.s = Labeling(s, kr);
        best.t = Labeling(t, kc);
        have = true;
      }
    } while (std::next_permutation(t.begin(), t.end()));
  } while (std::next_permutation(s.begin(), s.end()));
  // Recompute from integer block counts so the value is summation-order free.
  best.value = support_inner(a, best.s, best.t, gamma);
  return best;
}

/// Per-node edge counts toward each class of the other side:
/// out(i, b) = #{j : labels(j) = b, A_ij = 1}.
inline Matrix<long> side_counts(const BitRows& bits, const Labeling& other) {
  const auto masks = class_masks(other.labels(), other.num_classes());
  Matrix<long> out(bits.rows(), other.num_classes(), 0);
  for (std::size_t i = 0; i < bits.rows(); ++i)
    for (std::size_t b = 0; b < masks.size(); ++b) out(i, b) = bits.count_and(i, masks[b]);
  return out;
}

/// cost(i, r) = sum_b gamma(r, b) counts(i, b), or with gamma transposed.
inline RealMatrix assignment_costs(const Matrix<long>& counts, const RealMatrix& gamma, bool transpose) {
  const std::size_t k_self = transpose ? gamma.cols() : gamma.rows();
  const std::size_t k_other = counts.cols();
  RealMatrix cost(counts.rows(), k_self, 0.0);
  for (std::size_t i = 0; i < counts.rows(); ++i)
    for (std::size_t r = 0; r < k_self; ++r) {
      double v = 0.0;
      for (std::size_t b = 0; b < k_other; ++b)
        v += (transpose ? gamma(b, r) : gamma(r, b)) * static_cast<double>(counts(i, b));
      cost(i, r) = v;
    }
  return cost;
}

/// Block edge counts from column-side counts (counts(j, a) toward row class a).
inline Matrix<std::int64_t> blocks_from_col_counts(const Matrix<long>& col_counts, const Labeling& t) {
  Matrix<std::int64_t> blocks(col_counts.cols(), t.num_classes(), 0);
  for (std::size_t j = 0; j < col_counts.rows(); ++j)
    for (std::size_t a = 0; a < col_counts.cols(); ++a)
      blocks(a, static_cast<std::size_t>(t[j])) += col_counts(j, a);
  return blocks;
}

inline Labeling random_feasible(const ClassCounts& counts, CounterStream& rng) {
  auto labels = sorted_labeling(counts).labels();
  rng.shuffle(std::span<int>(labels));
  return Labeling(std::move(labels), counts.num_classes());
}

inline SupportResult support_alternating(const BinaryMatrix& a, const ClassCounts& mu, const ClassCounts& nu,
                                         const RealMatrix& gamma, std::size_t restarts, std::uint64_t seed) {
  if (restarts == 0) throw std::invalid_argument("support_empirical: alternating needs restarts >= 1");
  const BitRows rows(a);
  const BitRows cols(a.transposed());
  const double cells = static_cast<double>(a.rows() * a.cols());
  SupportResult best;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    CounterStream rng(seed, StreamRole::kSupportRestart, r);
    Labeling s = random_feasible(mu, rng);
    Labeling t = random_feasible(nu, rng);
    double value = support_inner(a, s, t, gamma);
    for (int iter = 0; iter < 10000; ++iter) {
      Labeling t_next = assign_side(assignment_costs(side_counts(cols, s), gamma, true), nu);
      const auto row_counts = side_counts(rows, t_next);
      Labeling s_next = assign_side(assignment_costs(row_counts, gamma, false), mu);
      const double next = inner_from_counts(gamma, blocks_from_col_counts(side_counts(cols, s_next), t_next), cells);
      if (!(next > value)) break;
      s = std::move(s_next);
      t = std::move(t_next);
      value = next;
    }
    if (!have || value > best.value) {
      best = {value, s, t};
      have = true;
    }
  }
  return best;
}

}  // namespace detail

/// Empirical support function h(Gamma) = max over (S, T) with class counts
/// (mu, nu) of <Gamma, A/ST>.
///
/// kExact enumerates every admissible (S, T) (arrays up to 10 x 10).
/// kAlternating runs `restarts` random feasible starts, each alternating
/// exact column and row assignments until the value stops increasing; its
/// value never exceeds the exact one. Ties keep the earliest restart.
inline SupportResult support_empirical(const BinaryMatrix& a, const ClassCounts& mu, const ClassCounts& nu,
                                       const RealMatrix& gamma, const SupportOptions& options = {}) {
  detail::check_support_inputs(a, mu, nu, gamma);
  if (options.method == SupportMethod::kExact) return detail::support_exact(a, mu, nu, gamma);
  return detail::support_alternating(a, mu, nu, gamma, options.restarts, options.seed);
}

/// Population summary omega/sigma tau for K = 2 interval partitions.
inline BlockSummary population_block_mass(const Kernel& kernel, const IntervalPartition& sigma,
                                          const IntervalPartition& tau) {
  PartitionMassOracle oracle(kernel, {sigma}, {tau});
  BlockSummary out;
  out.mass = oracle.mass_matrix(0, 0);
  out.row_proportions = {sigma.measure(0), sigma.measure(1)};
  out.col_proportions = {tau.measure(0), tau.measure(1)};
  out.means = detail::means_from(out.mass, out.row_proportions, out.col_proportions);
  return out;
}

struct OracleSupportResult {
  double value = 0.0;
  IntervalPartition sigma = IntervalPartition::canonical_lower(0.5);
  IntervalPartition tau = IntervalPartition::canonical_lower(0.5);
  bool exact = false;
};

struct OracleOptions {
  /// Refuse (UnsupportedError) rather than approximate for kernels where
  /// the four-case reduction does not apply.
  bool require_exact = false;
  std::size_t grid = 256;
};

namespace detail {

inline double proportion0(const std::vector<double>& p) {
  if (p.size() != 2) throw UnsupportedError("population oracles are implemented for K = 2 only");
  return p[0];
}

template <typename Score>
OracleSupportResult best_pair(const PartitionMassOracle& oracle, Score&& score) {
  OracleSupportResult out;
  bool have = false;
  for (std::size_t r = 0; r < oracle.rows().size(); ++r)
    for (std::size_t c = 0; c < oracle.cols().size(); ++c) {
      const double v = score(oracle.mass(r, c));
      if (!have || v > out.value) {
        out.value = v;
        out.sigma = oracle.rows()[r];
        out.tau = oracle.cols()[c];
        have = true;
      }
    }
  out.exact = oracle.exact();
  return out;
}

/// Canonical pairs when the four-case reduction is exact, else the
/// threshold-grid family.
inline PartitionMassOracle make_oracle(const Kernel& kernel, double mu0, double nu0, const OracleOptions& options,
                                       const char* what) {
  if (kernel.exact_separable())
    return PartitionMassOracle(kernel, canonical_family(mu0), canonical_family(nu0));
  if (options.require_exact)
    throw UnsupportedError(std::string(what) +
                           ": exact evaluation needs an unclamped separable kernel; use the grid approximation");
  return PartitionMassOracle(kernel, threshold_family(mu0, options.grid), threshold_family(nu0, options.grid));
}

}  // namespace detail

/// Population support function sup over (sigma, tau) of <Gamma, omega/sigma tau>.
/// Exact (four canonical pairs) for unclamped separable kernels; otherwise
/// the maximum over the threshold-grid family, flagged as inexact.
inline OracleSupportResult support_oracle(const Kernel& kernel, const std::vector<double>& mu,
                                          const std::vector<double>& nu, const RealMatrix& gamma,
                                          const OracleOptions& options = {}) {
  const double mu0 = detail::proportion0(mu), nu0 = detail::proportion0(nu);
  if (gamma.rows() != 2 || gamma.cols() != 2) throw std::invalid_argument("support_oracle: direction must be 2 x 2");
  const auto oracle = detail::make_oracle(kernel, mu0, nu0, options, "support_oracle");
  auto res = detail::best_pair(oracle, [&](const std::array<double, 4>& m) {
    return gamma(0, 0) * m[0] + gamma(0, 1) * m[1] + gamma(1, 0) * m[2] + gamma(1, 1) * m[3];
  });
  res.exact = res.exact && kernel.exact_separable();
  return res;
}

}  // namespace coclust
