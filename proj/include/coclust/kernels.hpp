#pragma once

// Generative kernels omega: [0,1]^2 -> [0,1] and sampling of separately
// exchangeable binary arrays from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "coclust/detail/matrix.hpp"
#include "coclust/detail/quadrature.hpp"
#include "coclust/detail/rng.hpp"
#include "coclust/types.hpp"

namespace coclust {

namespace detail {

inline void check_beta(double beta) {
  if (!(beta >= 1.0) || !std::isfinite(beta))
    throw std::domain_error("sigmoid exponent beta must be finite and >= 1");
}

inline void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error(std::string(what) + " must lie in [0, 1]");
}

/// x^b / (x^b + (1-x)^b) - 1/2, evaluated in log space so large b neither
/// overflows nor underflows.
inline double centered_sigmoid(double beta, double x) noexcept {
  if (x <= 0.0) return -0.5;
  if (x >= 1.0) return 0.5;
  const double t = beta * (std::log1p(-x) - std::log(x));
  // 1/(1+e^t) - 1/2 = -tanh(t/2)/2
  return -0.5 * std::tanh(0.5 * t);
}

inline double xlogx(double x) noexcept { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Bernoulli negative entropy w ln w + (1-w) ln(1-w), with the 0 ln 0 = 0 limit.
inline double bernoulli_neg_entropy(double w) noexcept { return xlogx(w) + xlogx(1.0 - w); }

}  // namespace detail

/// Area normalizer Z_beta = 4 * int_0^{1/2} |x^b/(x^b+(1-x)^b) - 1/2| dx.
inline double z_beta(double beta) {
  detail::check_beta(beta);
  const double quarter = quad::integrate(
      [beta](double x) { return std::abs(detail::centered_sigmoid(beta, x)); }, 0.0, 0.5, 0.25e-10,
      "z_beta");
  return 4.0 * quarter;
}

/// Normalized sigmoid f_beta(x) = (x^b/(x^b+(1-x)^b) - 1/2) / Z_beta.
/// Recomputes Z_beta; prefer SigmoidSeparableKernel::f in loops.
inline double f_beta(double beta, double x) {
  detail::check_beta(beta);
  detail::check_unit(x, "x");
  return detail::centered_sigmoid(beta, x) / z_beta(beta);
}

/// rho * (f_beta(x) f_beta(y) + 1/2), clamped into [0, 1].
class SigmoidSeparableKernel {
 public:
  SigmoidSeparableKernel(double beta, double rho) : beta_(beta), rho_(rho) {
    detail::check_beta(beta);
    if (!(rho > 0.0 && rho <= 1.0)) throw std::domain_error("sparsity scale rho must lie in (0, 1]");
    z_beta_ = coclust::z_beta(beta);
    max_abs_f_ = 0.5 / z_beta_;
    valid_unclamped_ = max_abs_f_ <= 1.0 / std::sqrt(2.0);
  }

  double beta() const noexcept { return beta_; }
  double rho() const noexcept { return rho_; }
  double z_beta() const noexcept { return z_beta_; }
  double max_abs_f() const noexcept { return max_abs_f_; }
  /// True when rho (f f + 1/2) never leaves [0, 1], so no clamping occurs.
  bool valid_unclamped() const noexcept { return valid_unclamped_; }

  double f(double x) const noexcept { return detail::centered_sigmoid(beta_, x) / z_beta_; }

  double eval(double x, double y) const noexcept { return combine(f(x), f(y)); }

  /// Kernel value from precomputed f(x), f(y).
  double combine(double fx, double fy) const noexcept {
    return std::clamp(rho_ * (fx * fy + 0.5), 0.0, 1.0);
  }

  /// int_a^b f_beta.
  double f_integral(double a, double b) const {
    return quad::integrate([this](double x) { return f(x); }, a, b, 1e-12, "f_integral");
  }

  /// int_0^1 f_beta^2.
  double f_square_integral() const {
    auto sq = [this](double x) {
      const double v = f(x);
      return v * v;
    };
    return 2.0 * quad::integrate(sq, 0.0, 0.5, 1e-12, "f_square_integral");
  }

 private:
  double beta_;
  double rho_;
  double z_beta_ = 0.0;
  double max_abs_f_ = 0.0;
  bool valid_unclamped_ = false;
};

inline SigmoidSeparableKernel make_sigmoid_kernel(double beta, double rho) {
  return SigmoidSeparableKernel(beta, rho);
}

namespace detail {

inline std::vector<double> cumulative_breaks(const ClassCounts& counts) {
  std::vector<double> c(counts.num_classes() + 1, 0.0);
  std::size_t running = 0;
  for (std::size_t a = 0; a < counts.num_classes(); ++a) {
    running += counts[a];
    c[a + 1] = static_cast<double>(running) / static_cast<double>(counts.total());
  }
  c.back() = 1.0;
  return c;
}

/// Left-continuous inverse CDF: first class a with x <= F(a).
inline std::size_t inverse_cdf(const std::vector<double>& breaks, double x) noexcept {
  const auto it = std::lower_bound(breaks.begin() + 1, breaks.end(), x);
  const auto idx = static_cast<std::size_t>(it - (breaks.begin() + 1));
  return std::min(idx, breaks.size() - 2);
}

inline double overlap(double a0, double a1, double b0, double b1) noexcept {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace detail

/// Piecewise-constant kernel theta_{F_mu^{-1}(x), F_nu^{-1}(y)}.
class BlockKernel {
 public:
  explicit BlockKernel(CoBlockParams phi)
      : phi_(std::move(phi)),
        row_breaks_(detail::cumulative_breaks(phi_.mu)),
        col_breaks_(detail::cumulative_breaks(phi_.nu)) {}

  const CoBlockParams& params() const noexcept { return phi_; }
  const std::vector<double>& row_breaks() const noexcept { return row_breaks_; }
  const std::vector<double>& col_breaks() const noexcept { return col_breaks_; }

  std::size_t row_class(double x) const noexcept { return detail::inverse_cdf(row_breaks_, x); }
  std::size_t col_class(double y) const noexcept { return detail::inverse_cdf(col_breaks_, y); }

  double eval(double x, double y) const noexcept { return phi_.theta(row_class(x), col_class(y)); }

  double cell_value(std::size_t a, std::size_t b) const noexcept { return phi_.theta(a, b); }

 private:
  CoBlockParams phi_;
  std::vector<double> row_breaks_;
  std::vector<double> col_breaks_;
};

/// Probabilities on an equal-measure R x C grid of [0,1]^2.
class GridKernel {
 public:
  explicit GridKernel(RealMatrix values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("GridKernel: empty grid");
    for (double v : values_.data())
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("GridKernel: values must lie in [0, 1]");
    row_breaks_ = uniform_breaks(values_.rows());
    col_breaks_ = uniform_breaks(values_.cols());
  }

  static GridKernel constant(double c) { return GridKernel(RealMatrix(1, 1, c)); }

  const RealMatrix& values() const noexcept { return values_; }
  const std::vector<double>& row_breaks() const noexcept { return row_breaks_; }
  const std::vector<double>& col_breaks() const noexcept { return col_breaks_; }

  double eval(double x, double y) const noexcept {
    return values_(cell(x, values_.rows()), cell(y, values_.cols()));
  }

  double cell_value(std::size_t a, std::size_t b) const noexcept { return values_(a, b); }

 private:
  static std::vector<double> uniform_breaks(std::size_t cells) {
    std::vector<double> b(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) b[i] = static_cast<double>(i) / static_cast<double>(cells);
    return b;
  }
  static std::size_t cell(double x, std::size_t cells) noexcept {
    const auto c = static_cast<std::size_t>(std::max(0.0, x) * static_cast<double>(cells));
    return std::min(c, cells - 1);
  }

  RealMatrix values_;
  std::vector<double> row_breaks_;
  std::vector<double> col_breaks_;
};

/// Any generative kernel. Immutable; safe to share across threads.
class Kernel {
 public:
  using Variant = std::variant<SigmoidSeparableKernel, BlockKernel, GridKernel>;

  Kernel(SigmoidSeparableKernel k) : v_(std::move(k)) {}  // NOLINT(google-explicit-constructor)
  Kernel(BlockKernel k) : v_(std::move(k)) {}             // NOLINT(google-explicit-constructor)
  Kernel(GridKernel k) : v_(std::move(k)) {}              // NOLINT(google-explicit-constructor)

  const Variant& variant() const noexcept { return v_; }

  const SigmoidSeparableKernel* sigmoid() const noexcept { return std::get_if<SigmoidSeparableKernel>(&v_); }

  /// Separable kernel with no clamping active; the closed-form population
  /// oracles apply exactly.
  bool exact_separable() const noexcept {
    const auto* s = sigmoid();
    return s != nullptr && s->valid_unclamped();
  }

  double eval(double x, double y) const noexcept {
    return std::visit([&](const auto& k) { return k.eval(x, y); }, v_);
  }
  double operator()(double x, double y) const noexcept { return eval(x, y); }

  /// Values at all (xs[i], ys[j]).
  RealMatrix tabulate(std::span<const double> xs, std::span<const double> ys) const {
    RealMatrix out(xs.size(), ys.size());
    if (const auto* s = sigmoid()) {
      std::vector<double> fy(ys.size());
      for (std::size_t j = 0; j < ys.size(); ++j) fy[j] = s->f(ys[j]);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fx = s->f(xs[i]);
        for (std::size_t j = 0; j < ys.size(); ++j) out(i, j) = s->combine(fx, fy[j]);
      }
    } else {
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) out(i, j) = eval(xs[i], ys[j]);
    }
    return out;
  }

  /// Discontinuity lines of the kernel along each axis (always includes 0, 1).
  std::vector<double> row_breaks() const {
    return std::visit(
        [](const auto& k) -> std::vector<double> {
          if constexpr (std::is_same_v<std::decay_t<decltype(k)>, SigmoidSeparableKernel>)
            return {0.0, 1.0};
          else
            return k.row_breaks();
        },
        v_);
  }
  std::vector<double> col_breaks() const {
    return std::visit(
        [](const auto& k) -> std::vector<double> {
          if constexpr (std::is_same_v<std::decay_t<decltype(k)>, SigmoidSeparableKernel>)
            return {0.0, 1.0};
          else
            return k.col_breaks();
        },
        v_);
  }

  /// int over [x0,x1] x [y0,y1] of omega.
  double rectangle_mass(double x0, double x1, double y0, double y1, double abs_tol = 1e-10) const {
    if (x1 <= x0 || y1 <= y0) return 0.0;
    if (const auto* s = sigmoid()) {
      if (s->valid_unclamped())
        return s->rho() * (s->f_integral(x0, x1) * s->f_integral(y0, y1) + 0.5 * (x1 - x0) * (y1 - y0));
      return quad::integrate2d([s](double x, double y) { return s->eval(x, y); }, x0, x1, y0, y1, abs_tol);
    }
    return piecewise_sum([](double w) { return w; }, x0, x1, y0, y1);
  }

  /// int int g(omega(x, y)) over the unit square.
  template <typename G>
  double integrate_functional(G&& g, double abs_tol = 1e-11) const {
    if (const auto* s = sigmoid()) {
      const double split[] = {0.0, 0.5, 1.0};
      return quad::integrate2d_panels([&](double x, double y) { return g(s->eval(x, y)); },
                                      std::span<const double>(split), std::span<const double>(split),
                                      abs_tol);
    }
    return piecewise_sum(g, 0.0, 1.0, 0.0, 1.0);
  }

  /// int int omega.
  double total_mass() const { return rectangle_mass(0.0, 1.0, 0.0, 1.0); }

  /// int int omega^2.
  double square_integral() const {
    if (exact_separable()) {
      const auto* s = sigmoid();
      const double f2 = s->f_square_integral();
      return s->rho() * s->rho() * (f2 * f2 + 0.25);
    }
    return integrate_functional([](double w) { return w * w; });
  }

  /// int int [omega ln omega + (1 - omega) ln(1 - omega)].
  double neg_entropy() const { return integrate_functional(detail::bernoulli_neg_entropy); }

 private:
  template <typename G>
  double piecewise_sum(G&& g, double x0, double x1, double y0, double y1) const {
    return std::visit(
        [&](const auto& k) -> double {
          if constexpr (std::is_same_v<std::decay_t<decltype(k)>, SigmoidSeparableKernel>) {
            return 0.0;  // unreachable: handled by callers
          } else {
            const auto& rb = k.row_breaks();
            const auto& cb = k.col_breaks();
            double total = 0.0;
            for (std::size_t a = 0; a + 1 < rb.size(); ++a) {
              const double wx = detail::overlap(rb[a], rb[a + 1], x0, x1);
              if (wx <= 0.0) continue;
              for (std::size_t b = 0; b + 1 < cb.size(); ++b) {
                const double wy = detail::overlap(cb[b], cb[b + 1], y0, y1);
                if (wy > 0.0) total += wx * wy * g(k.cell_value(a, b));
              }
            }
            return total;
          }
        },
        v_);
  }

  Variant v_;
};

/// Sparsity schedules for rho_n.
enum class RhoMode { kDense, kPoly, kPolylog };

inline std::string_view to_string(RhoMode mode) noexcept {
  switch (mode) {
    case RhoMode::kDense: return "dense";
    case RhoMode::kPoly: return "poly";
    case RhoMode::kPolylog: return "polylog";
  }
  return "?";
}

inline RhoMode parse_rho_mode(std::string_view s) {
  if (s == "dense") return RhoMode::kDense;
  if (s == "poly") return RhoMode::kPoly;
  if (s == "polylog") return RhoMode::kPolylog;
  throw std::invalid_argument("unknown rho mode '" + std::string(s) + "' (expected dense|poly|polylog)");
}

/// dense: 1/2; poly: n^{-2/3}; polylog: min(1, (ln n)^2 / n).
inline double rho_schedule(RhoMode mode, std::size_t n) {
  if (n < 2) throw std::domain_error("rho_schedule: n must be >= 2");
  const double nn = static_cast<double>(n);
  switch (mode) {
    case RhoMode::kDense: return 0.5;
    case RhoMode::kPoly: return std::pow(nn, -2.0 / 3.0);
    case RhoMode::kPolylog: {
      const double l = std::log(nn);
      return std::min(1.0, l * l / nn);
    }
  }
  throw std::logic_error("rho_schedule: bad mode");
}

struct LatentSample {
  std::vector<double> xi;
  std::vector<double> zeta;
  std::uint64_t seed = 0;
};

struct SampledArray {
  BinaryMatrix a;
  std::optional<RealMatrix> w;
  LatentSample latents;
};

/// Draws xi, zeta ~ U[0,1) and A_ij ~ Bernoulli(omega(xi_i, zeta_j)).
/// Latents and edges come from disjoint counter streams keyed by seed.
inline SampledArray sample_bipartite(const Kernel& kernel, std::size_t m, std::size_t n, std::uint64_t seed,
                                     bool keep_w = false) {
  if (m == 0 || n == 0) throw std::invalid_argument("sample_bipartite: m and n must be >= 1");
  SampledArray out;
  out.latents.seed = seed;
  out.latents.xi.resize(m);
  out.latents.zeta.resize(n);
  CounterStream rows(seed, StreamRole::kRowLatent);
  CounterStream cols(seed, StreamRole::kColLatent);
  for (auto& x : out.latents.xi) x = rows.uniform();
  for (auto& z : out.latents.zeta) z = cols.uniform();

  RealMatrix w = kernel.tabulate(out.latents.xi, out.latents.zeta);
  CounterStream edges(seed, StreamRole::kBernoulli);
  out.a = BinaryMatrix(m, n, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.a(i, j) = edges.bernoulli(w(i, j)) ? 1 : 0;
  if (keep_w) out.w = std::move(w);
  return out;
}

}  // namespace coclust
