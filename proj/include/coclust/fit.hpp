#pragma once

// Co-blockmodel M-estimation: search over labelings (S, T) with block-mean
// plug-in theta by simulated annealing with restarts and a greedy polish.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coclust/cocluster.hpp"
#include "coclust/detail/rng.hpp"
#include "coclust/kernels.hpp"
#include "coclust/risk.hpp"
#include "coclust/types.hpp"

namespace coclust {

/// Block means of A under (S, T), clamped into [eps, 1 - eps]; empty blocks
/// get 1/2.
inline RealMatrix block_means(const BinaryMatrix& a, const Labeling& s, const Labeling& t, double eps = kDefaultEps) {
  detail::check_shape(a, s, t);
  const auto counts = detail::block_edge_counts(a, s, t);
  const auto rows = s.counts(), cols = t.counts();
  RealMatrix means(counts.rows(), counts.cols(), 0.5);
  for (std::size_t x = 0; x < counts.rows(); ++x)
    for (std::size_t y = 0; y < counts.cols(); ++y) {
      const auto size = rows[x] * cols[y];
      if (size > 0)
        means(x, y) = clamp_probability(static_cast<double>(counts(x, y)) / static_cast<double>(size), eps);
    }
  return means;
}

enum class InitStrategy { kRandom, kOracleLatent, kProvided };

inline InitStrategy parse_init_strategy(std::string_view s) {
  if (s == "random") return InitStrategy::kRandom;
  if (s == "oracle_latent") return InitStrategy::kOracleLatent;
  if (s == "provided") return InitStrategy::kProvided;
  throw std::invalid_argument("unknown init strategy '" + std::string(s) + "' (expected random|oracle_latent|provided)");
}

struct FitConfig {
  std::size_t restarts = 8;
  /// 0 selects 50 (m + n).
  std::size_t anneal_steps = 0;
  double initial_temperature = 1.0;
  double cooling_rate = 0.995;
  bool single_relabel = true;
  bool pair_swap = true;
  double eps = kDefaultEps;
  std::uint64_t seed = 0;
  InitStrategy init = InitStrategy::kRandom;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("FitConfig: restarts must be >= 1");
    if (!(initial_temperature > 0.0)) throw std::invalid_argument("FitConfig: initial_temperature must be > 0");
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw std::invalid_argument("FitConfig: cooling_rate must lie in (0, 1)");
    if (!single_relabel && !pair_swap) throw std::invalid_argument("FitConfig: enable at least one move type");
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("FitConfig: eps must lie in (0, 1/2)");
  }
};

/// Context for init_labels: latents for kOracleLatent, labelings for kProvided.
struct InitContext {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 2;
  const LatentSample* latents = nullptr;
  const std::pair<Labeling, Labeling>* provided = nullptr;
  std::uint64_t seed = 0;
  std::uint64_t restart = 0;
};

/// kOracleLatent: node in class 0 iff its latent position is < 1/2.
/// kRandom: each label uniform on {0..K-1}, proportions unconstrained.
inline std::pair<Labeling, Labeling> init_labels(InitStrategy strategy, const InitContext& ctx) {
  switch (strategy) {
    case InitStrategy::kOracleLatent: {
      if (ctx.latents == nullptr) throw std::invalid_argument("init_labels: oracle_latent requires latent positions");
      if (ctx.k != 2) throw std::invalid_argument("init_labels: oracle_latent requires K = 2");
      auto split = [](const std::vector<double>& v) {
        std::vector<int> l(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) l[i] = v[i] < 0.5 ? 0 : 1;
        return Labeling(std::move(l), 2);
      };
      return {split(ctx.latents->xi), split(ctx.latents->zeta)};
    }
    case InitStrategy::kProvided:
      if (ctx.provided == nullptr) throw std::invalid_argument("init_labels: provided strategy without labelings");
      return *ctx.provided;
    case InitStrategy::kRandom: {
      CounterStream rng(ctx.seed, StreamRole::kInit, ctx.restart);
      auto draw = [&](std::size_t len) {
        std::vector<int> l(len);
        for (auto& v : l) v = static_cast<int>(rng.below(ctx.k));
        return Labeling(std::move(l), ctx.k);
      };
      auto s = draw(ctx.m);
      auto t = draw(ctx.n);
      return {std::move(s), std::move(t)};
    }
  }
  throw std::logic_error("init_labels: bad strategy");
}

struct RestartTrace {
  double initial = 0.0;
  double after_anneal = 0.0;
  /// Objective after each polish sweep that changed something.
  std::vector<double> polish;
  double final_value = 0.0;
};

struct FitResult {
  CoBlockParams phi_hat;
  Labeling s;
  Labeling t;
  double objective = 0.0;
  ObjectiveKind kind = ObjectiveKind::kProfileLikelihood;
  std::vector<RestartTrace> trace;
  std::uint64_t seed = 0;
  std::size_t best_restart = 0;
};

namespace detail {

/// Incremental block statistics for single-node moves. The score is the
/// total (not averaged) criterion, oriented so larger is better.
class FitState {
 public:
  FitState(const BinaryMatrix& a, const BinaryMatrix& at, Labeling s, Labeling t, ObjectiveKind kind, double eps)
      : a_(a), at_(at), kind_(kind), eps_(eps), k_(s.num_classes()) {
    sides_[0].labels = std::move(s);
    sides_[1].labels = std::move(t);
    rebuild();
  }

  const Labeling& labels(int side) const { return sides_[side].labels; }
  std::size_t size(int side) const { return sides_[side].labels.size(); }
  std::size_t num_classes() const { return k_; }
  double score() const { return score_; }

  /// Score change from moving node i of `side` to class c.
  double relabel_delta(int side, std::size_t i, int c) const {
    const int from = sides_[side].labels[i];
    if (from == c) return 0.0;
    const auto& sums = sides_[side].sums;
    double before = 0.0, after = 0.0;
    for (std::size_t b = 0; b < k_; ++b) {
      const long r = sums(i, b);
      before += block(side, from, b, 0, 0) + block(side, c, b, 0, 0);
      after += block(side, from, b, -r, -1) + block(side, c, b, r, +1);
    }
    return after - before;
  }

  /// Score change from exchanging the classes of nodes i and j on `side`.
  double swap_delta(int side, std::size_t i, std::size_t j) const {
    const int ci = sides_[side].labels[i], cj = sides_[side].labels[j];
    if (ci == cj) return 0.0;
    const auto& sums = sides_[side].sums;
    double before = 0.0, after = 0.0;
    for (std::size_t b = 0; b < k_; ++b) {
      const long d = sums(j, b) - sums(i, b);
      before += block(side, ci, b, 0, 0) + block(side, cj, b, 0, 0);
      after += block(side, ci, b, d, 0) + block(side, cj, b, -d, 0);
    }
    return after - before;
  }

  void apply_relabel(int side, std::size_t i, int c, double delta) {
    move(side, i, c);
    score_ += delta;
  }

  void apply_swap(int side, std::size_t i, std::size_t j, double delta) {
    const int ci = sides_[side].labels[i], cj = sides_[side].labels[j];
    move(side, i, cj);
    move(side, j, ci);
    score_ += delta;
  }

  void reset(Labeling s, Labeling t) {
    sides_[0].labels = std::move(s);
    sides_[1].labels = std::move(t);
    rebuild();
  }

  /// Full recomputation; also removes drift accumulated by deltas.
  void rebuild() {
    for (int side = 0; side < 2; ++side) {
      auto& sd = sides_[side];
      sd.counts.assign(k_, 0);
      for (int l : sd.labels.labels()) ++sd.counts[static_cast<std::size_t>(l)];
    }
    ones_ = Matrix<long>(k_, k_, 0);
    for (int side = 0; side < 2; ++side) {
      const BinaryMatrix& mat = side == 0 ? a_ : at_;
      const Labeling& other = sides_[1 - side].labels;
      auto& sums = sides_[side].sums;
      sums = Matrix<long>(mat.rows(), k_, 0);
      for (std::size_t i = 0; i < mat.rows(); ++i) {
        const auto row = mat.row(i);
        for (std::size_t j = 0; j < mat.cols(); ++j)
          if (row[j]) ++sums(i, static_cast<std::size_t>(other[j]));
      }
    }
    for (std::size_t i = 0; i < a_.rows(); ++i)
      for (std::size_t b = 0; b < k_; ++b)
        ones_(static_cast<std::size_t>(sides_[0].labels[i]), b) += sides_[0].sums(i, b);
    score_ = 0.0;
    for (std::size_t x = 0; x < k_; ++x)
      for (std::size_t y = 0; y < k_; ++y)
        score_ += contribution(ones_(x, y), static_cast<long>(sides_[0].counts[x] * sides_[1].counts[y]));
  }

  double contribution(long ones, long size) const {
    if (size <= 0) return 0.0;
    const double n1 = static_cast<double>(ones);
    const double n0 = static_cast<double>(size - ones);
    const double th = clamp_probability(n1 / static_cast<double>(size), eps_);
    if (kind_ == ObjectiveKind::kLeastSquares)
      return -(n1 * (1.0 - th) * (1.0 - th) + n0 * th * th);
    double v = 0.0;
    if (ones > 0) v += n1 * std::log(th);
    if (size > ones) v += n0 * std::log1p(-th);
    return v;
  }

 private:
  struct Side {
    Labeling labels;
    std::vector<std::size_t> counts;
    Matrix<long> sums;  // node x other-side class edge counts
  };

  /// Contribution of block (c on `side`, b on the other side) after adding
  /// d_ones edges and d_nodes nodes on `side`.
  double block(int side, int c, std::size_t b, long d_ones, long d_nodes) const {
    const auto cc = static_cast<std::size_t>(c);
    const long nodes = static_cast<long>(sides_[side].counts[cc]) + d_nodes;
    const long other = static_cast<long>(sides_[1 - side].counts[b]);
    const long ones = (side == 0 ? ones_(cc, b) : ones_(b, cc)) + d_ones;
    return contribution(ones, nodes * other);
  }

  void move(int side, std::size_t i, int c) {
    auto& sd = sides_[side];
    const int from = sd.labels[i];
    if (from == c) return;
    const auto f = static_cast<std::size_t>(from), t = static_cast<std::size_t>(c);
    for (std::size_t b = 0; b < k_; ++b) {
      const long r = sd.sums(i, b);
      if (side == 0) {
        ones_(f, b) -= r;
        ones_(t, b) += r;
      } else {
        ones_(b, f) -= r;
        ones_(b, t) += r;
      }
    }
    --sd.counts[f];
    ++sd.counts[t];
    sd.labels.set(i, c);
    const BinaryMatrix& mat = side == 0 ? a_ : at_;
    auto& other_sums = sides_[1 - side].sums;
    const auto row = mat.row(i);
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j]) {
        --other_sums(j, f);
        ++other_sums(j, t);
      }
  }

  const BinaryMatrix& a_;
  const BinaryMatrix& at_;
  ObjectiveKind kind_;
  double eps_;
  std::size_t k_;
  Side sides_[2];
  Matrix<long> ones_;
  double score_ = 0.0;
};

/// Greedy polish: sweep every node and class, taking strictly improving
/// single relabels until a full sweep changes nothing.
inline void polish(FitState& state, std::vector<double>& trace, double cells, ObjectiveKind kind) {
  const int k = static_cast<int>(state.num_classes());
  if (k < 2) return;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    bool changed = false;
    for (int side = 0; side < 2; ++side)
      for (std::size_t i = 0; i < state.size(side); ++i) {
        int best_c = -1;
        double best_d = 1e-12 * std::max(1.0, std::abs(state.score()));
        for (int c = 0; c < k; ++c) {
          const double d = state.relabel_delta(side, i, c);
          if (d > best_d) {
            best_d = d;
            best_c = c;
          }
        }
        if (best_c >= 0) {
          state.apply_relabel(side, i, best_c, best_d);
          changed = true;
        }
      }
    if (!changed) break;
    state.rebuild();
    trace.push_back(kind == ObjectiveKind::kLeastSquares ? -state.score() / cells : state.score() / cells);
  }
}

}  // namespace detail

/// Fits a K-class co-blockmodel to A by maximizing the profile likelihood
/// (kind = pl) or minimizing squared error (kind = ls) over labelings, with
/// theta profiled out as block means. Deterministic given config.seed.
inline FitResult fit_coblockmodel(const BinaryMatrix& a, std::size_t k, ObjectiveKind kind, const FitConfig& config,
                                  const LatentSample* latents = nullptr,
                                  const std::pair<Labeling, Labeling>* provided = nullptr) {
  config.validate();
  if (k < 1) throw std::invalid_argument("fit_coblockmodel: K must be >= 1");
  if (a.empty()) throw std::invalid_argument("fit_coblockmodel: empty array");
  const std::size_t m = a.rows(), n = a.cols();
  const double cells = static_cast<double>(m * n);
  const BinaryMatrix at = a.transposed();
  const std::size_t steps = config.anneal_steps > 0 ? config.anneal_steps : 50 * (m + n);

  FitResult result;
  result.kind = kind;
  result.seed = config.seed;
  bool have = false;
  double best_score = 0.0;

  for (std::size_t r = 0; r < config.restarts; ++r) {
    InitContext ctx{m, n, k, latents, provided, config.seed, r};
    auto [s0, t0] = k == 1 ? std::pair{Labeling(std::vector<int>(m, 0), 1), Labeling(std::vector<int>(n, 0), 1)}
                           : init_labels(config.init, ctx);
    if (s0.size() != m || t0.size() != n || s0.num_classes() != k || t0.num_classes() != k)
      throw std::invalid_argument("fit_coblockmodel: initial labelings do not match the array or K");
    detail::FitState state(a, at, s0, t0, kind, config.eps);
    RestartTrace trace;
    const auto as_objective = [&](double score) { return kind == ObjectiveKind::kLeastSquares ? -score / cells : score / cells; };
    trace.initial = as_objective(state.score());

    Labeling best_s = state.labels(0), best_t = state.labels(1);
    double best_local = state.score();
    if (k >= 2) {
      CounterStream rng(config.seed, StreamRole::kFitRestart, r);
      double temperature = config.initial_temperature;
      for (std::size_t step = 0; step < steps; ++step, temperature *= config.cooling_rate) {
        const bool use_swap = config.pair_swap && (!config.single_relabel || rng.below(2) == 1);
        const int side = rng.below(m + n) < m ? 0 : 1;
        const std::size_t len = state.size(side);
        double delta = 0.0;
        std::size_t i = static_cast<std::size_t>(rng.below(len)), j = 0;
        int c = 0;
        if (use_swap) {
          j = static_cast<std::size_t>(rng.below(len));
          if (state.labels(side)[i] == state.labels(side)[j]) continue;
          delta = state.swap_delta(side, i, j);
        } else {
          c = static_cast<int>(rng.below(k - 1));
          if (c >= state.labels(side)[i]) ++c;
          delta = state.relabel_delta(side, i, c);
        }
        const double u = rng.uniform();
        if (delta >= 0.0 || u < std::exp(delta / temperature)) {
          if (use_swap)
            state.apply_swap(side, i, j, delta);
          else
            state.apply_relabel(side, i, c, delta);
          if (state.score() > best_local + 1e-12 * std::max(1.0, std::abs(best_local))) {
            best_local = state.score();
            best_s = state.labels(0);
            best_t = state.labels(1);
          }
        }
      }
      state.reset(best_s, best_t);
    }
    trace.after_anneal = as_objective(state.score());
    detail::polish(state, trace.polish, cells, kind);

    const RealMatrix theta = block_means(a, state.labels(0), state.labels(1), config.eps);
    const double objective = objective_at(a, theta, state.labels(0), state.labels(1), kind, config.eps);
    trace.final_value = objective;
    result.trace.push_back(trace);
    const double oriented = kind == ObjectiveKind::kLeastSquares ? -objective : objective;
    if (!have || oriented > best_score) {
      have = true;
      best_score = oriented;
      result.s = state.labels(0);
      result.t = state.labels(1);
      result.objective = objective;
      result.best_restart = r;
      result.phi_hat = CoBlockParams(result.s.counts(), result.t.counts(), theta);
    }
  }
  return result;
}

/// Fraction of nodes whose label agrees with `truth` under the best class
/// permutation (K = 2 only: identity or swap).
inline double label_accuracy(const Labeling& estimate, const Labeling& truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("label_accuracy: length mismatch");
  if (estimate.num_classes() > 2 || truth.num_classes() > 2)
    throw UnsupportedError("label_accuracy: implemented for K <= 2");
  const double agree = 1.0 - hamming_normalized(estimate, truth);
  return std::max(agree, 1.0 - agree);
}

}  // namespace coclust
