#pragma once

// Empirical objectives (least squares and profile likelihood), population
// risks for two-class co-blockmodels, KL divergences, the best-in-class
// blockmodel search and the co-cluster fidelity diagnostic.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coclust/cocluster.hpp"
#include "coclust/kernels.hpp"
#include "coclust/partition.hpp"
#include "coclust/types.hpp"

namespace coclust {

enum class ObjectiveKind { kLeastSquares, kProfileLikelihood };

inline std::string_view to_string(ObjectiveKind kind) noexcept {
  return kind == ObjectiveKind::kLeastSquares ? "ls" : "pl";
}

inline ObjectiveKind parse_objective_kind(std::string_view s) {
  if (s == "ls") return ObjectiveKind::kLeastSquares;
  if (s == "pl") return ObjectiveKind::kProfileLikelihood;
  throw std::invalid_argument("unknown estimator kind '" + std::string(s) + "' (expected ls|pl)");
}

inline constexpr double kDefaultEps = 1e-6;

struct RiskReport {
  double value = 0.0;
  ObjectiveKind kind = ObjectiveKind::kProfileLikelihood;
  std::optional<double> b_value;
  /// Empirical witness labeling, when the value came from A.
  std::optional<Labeling> s;
  std::optional<Labeling> t;
  /// Population witness partitions, when the value came from omega.
  std::optional<IntervalPartition> sigma;
  std::optional<IntervalPartition> tau;
  /// False when the value is a threshold-grid approximation.
  bool exact = true;
};

inline double clamp_probability(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

inline RealMatrix clamp_theta(const RealMatrix& theta, double eps) {
  RealMatrix out = theta;
  for (double& v : out.data()) v = clamp_probability(v, eps);
  return out;
}

/// D(p || q) for Bernoulli distributions; q is clamped into [eps, 1 - eps].
inline double bernoulli_kl(double p, double q, double eps = kDefaultEps) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("bernoulli_kl: p must lie in [0, 1]");
  q = clamp_probability(q, eps);
  double d = 0.0;
  if (p > 0.0) d += p * std::log(p / q);
  if (p < 1.0) d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return std::max(0.0, d);
}

struct LogitScale {
  double b = 0.0;   // max_ab |logit theta_ab|
  RealMatrix gamma;  // logit theta / b, or zero when b == 0
};

/// B(theta) and the normalized logit direction Gamma_theta, after clamping
/// theta into [eps, 1 - eps].
inline LogitScale b_and_gamma(const RealMatrix& theta, double eps = kDefaultEps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::domain_error("b_and_gamma: eps must lie in (0, 1/2)");
  LogitScale out;
  out.gamma = RealMatrix(theta.rows(), theta.cols(), 0.0);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double p = clamp_probability(theta.data()[k], eps);
    out.gamma.data()[k] = std::log(p / (1.0 - p));
    out.b = std::max(out.b, std::abs(out.gamma.data()[k]));
  }
  for (double& g : out.gamma.data()) g = out.b > 0.0 ? g / out.b : 0.0;
  return out;
}

namespace detail {

inline void check_params_for(const BinaryMatrix& a, const CoBlockParams& phi) {
  if (phi.mu.total() != a.rows() || phi.nu.total() != a.cols())
    throw std::invalid_argument("class counts (" + std::to_string(phi.mu.total()) + ", " +
                                std::to_string(phi.nu.total()) + ") are infeasible for a " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " array");
}

inline double weighted_sum(const CoBlockParams& phi, const RealMatrix& values) {
  double acc = 0.0;
  for (std::size_t a = 0; a < phi.mu.num_classes(); ++a)
    for (std::size_t b = 0; b < phi.nu.num_classes(); ++b)
      acc += phi.mu.proportion(a) * phi.nu.proportion(b) * values(a, b);
  return acc;
}

}  // namespace detail

/// The defining sum (1/mn) sum_ij of the objective at a fixed labeling.
/// ls: (theta_{S(i)T(j)} - A_ij)^2; pl: Bernoulli log-likelihood with theta
/// clamped into [eps, 1 - eps].
inline double objective_at(const BinaryMatrix& a, const RealMatrix& theta, const Labeling& s, const Labeling& t,
                           ObjectiveKind kind, double eps = kDefaultEps) {
  detail::check_shape(a, s, t);
  const auto counts = detail::block_edge_counts(a, s, t);
  const auto rows = s.counts(), cols = t.counts();
  double acc = 0.0;
  for (std::size_t x = 0; x < counts.rows(); ++x)
    for (std::size_t y = 0; y < counts.cols(); ++y) {
      const double ones = static_cast<double>(counts(x, y));
      const double zeros = static_cast<double>(rows[x] * cols[y]) - ones;
      if (kind == ObjectiveKind::kLeastSquares) {
        const double th = theta(x, y);
        acc += ones * (1.0 - th) * (1.0 - th) + zeros * th * th;
      } else {
        const double th = clamp_probability(theta(x, y), eps);
        if (ones > 0) acc += ones * std::log(th);
        if (zeros > 0) acc += zeros * std::log1p(-th);
      }
    }
  return acc / static_cast<double>(a.rows() * a.cols());
}

/// Empirical least-squares (minimized) or profile-likelihood (maximized)
/// objective over labelings with class counts (mu, nu), evaluated through
/// the support-function identities
///   R_A = sum mu nu theta^2 - 2 h_A(theta) + mean(A)
///   L_A = B(theta) h_A(Gamma_theta) + sum mu nu log(1 - theta).
inline RiskReport empirical_objective(const BinaryMatrix& a, const CoBlockParams& phi, ObjectiveKind kind,
                                      const SupportOptions& method = {}, double eps = kDefaultEps) {
  detail::check_params_for(a, phi);
  RiskReport out;
  out.kind = kind;
  double total = 0.0;
  for (unsigned char v : a.data()) total += v;
  const double mean = total / static_cast<double>(a.size());
  if (kind == ObjectiveKind::kLeastSquares) {
    RealMatrix sq = phi.theta;
    for (double& v : sq.data()) v = v * v;
    const auto h = support_empirical(a, phi.mu, phi.nu, phi.theta, method);
    out.value = detail::weighted_sum(phi, sq) - 2.0 * h.value + mean;
    out.s = h.s;
    out.t = h.t;
  } else {
    const auto scale = b_and_gamma(phi.theta, eps);
    RealMatrix log_complement = clamp_theta(phi.theta, eps);
    for (double& v : log_complement.data()) v = std::log1p(-v);
    const auto h = support_empirical(a, phi.mu, phi.nu, scale.gamma, method);
    out.value = scale.b * h.value + detail::weighted_sum(phi, log_complement);
    out.b_value = scale.b;
    out.s = h.s;
    out.t = h.t;
  }
  out.exact = method.method == SupportMethod::kExact;
  return out;
}

namespace detail {

/// Per-pair criterion for two-class phi given the 2 x 2 block masses.
/// pl: sum mass logit(theta) + mu nu log(1 - theta); ls (negated so larger
/// is better): sum 2 mass theta - mu nu theta^2.
inline double pair_score(const std::array<double, 4>& mass, const std::array<double, 4>& sizes,
                         const RealMatrix& theta, ObjectiveKind kind, double eps) {
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double th_raw = theta(k / 2, k % 2);
    if (kind == ObjectiveKind::kLeastSquares) {
      acc += 2.0 * mass[k] * th_raw - sizes[k] * th_raw * th_raw;
    } else {
      const double th = clamp_probability(th_raw, eps);
      acc += mass[k] * std::log(th / (1.0 - th)) + sizes[k] * std::log1p(-th);
    }
  }
  return acc;
}

inline std::array<double, 4> block_sizes(double mu0, double nu0) {
  return {mu0 * nu0, mu0 * (1.0 - nu0), (1.0 - mu0) * nu0, (1.0 - mu0) * (1.0 - nu0)};
}

}  // namespace detail

struct PopulationOptions {
  double eps = kDefaultEps;
  std::size_t grid = 256;
  bool require_exact = false;
};

/// Population risk of a two-class co-blockmodel against omega:
/// L_omega(phi) (pl) or R_omega(phi) (ls). Exact via the four canonical
/// partition pairs for unclamped separable kernels; other kernels fall back
/// to the threshold-grid family and the report is flagged inexact.
inline RiskReport population_risk(const Kernel& kernel, const CoBlockParams& phi, ObjectiveKind kind,
                                  const PopulationOptions& options = {}) {
  if (phi.mu.num_classes() != 2 || phi.nu.num_classes() != 2)
    throw UnsupportedError("population_risk: implemented for K = 2 only");
  const double mu0 = phi.mu.proportion(0), nu0 = phi.nu.proportion(0);
  const auto oracle = detail::make_oracle(kernel, mu0, nu0, {options.require_exact, options.grid}, "population_risk");
  const auto sizes = detail::block_sizes(mu0, nu0);
  auto best = detail::best_pair(
      oracle, [&](const std::array<double, 4>& m) { return detail::pair_score(m, sizes, phi.theta, kind, options.eps); });
  RiskReport out;
  out.kind = kind;
  out.sigma = best.sigma;
  out.tau = best.tau;
  out.exact = best.exact && kernel.exact_separable();
  if (kind == ObjectiveKind::kLeastSquares) {
    out.value = kernel.square_integral() - best.value;
  } else {
    out.value = best.value;
    out.b_value = b_and_gamma(phi.theta, options.eps).b;
  }
  return out;
}

/// Average Bernoulli KL of omega_phi from omega under the optimal alignment:
/// int int [omega ln omega + (1 - omega) ln(1 - omega)] - L_omega(phi).
/// `neg_entropy` may carry a precomputed kernel.neg_entropy().
inline double avg_kl(const Kernel& kernel, const CoBlockParams& phi, const PopulationOptions& options = {},
                     std::optional<double> neg_entropy = std::nullopt) {
  const double h = neg_entropy ? *neg_entropy : kernel.neg_entropy();
  const double l = population_risk(kernel, phi, ObjectiveKind::kProfileLikelihood, options).value;
  return std::max(0.0, h - l);
}

/// Limit of rho^{-1} D(rho p || rho q) as rho -> 0:
/// int int [p ln(p / q) - p + q]. Returns +infinity when q vanishes on a
/// block where p has positive mass.
inline double kl_small_rho_limit(const Kernel& base_p, const CoBlockParams& base_q) {
  const BlockKernel q(base_q);
  const auto& rb = q.row_breaks();
  const auto& cb = q.col_breaks();
  auto merge = [](std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  };
  const auto xs = merge(rb, base_p.row_breaks());
  const auto ys = merge(cb, base_p.col_breaks());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double x0 = xs[i], x1 = xs[i + 1], y0 = ys[j], y1 = ys[j + 1];
      if (x1 <= x0 || y1 <= y0) continue;
      const double qv = q.eval(0.5 * (x0 + x1), 0.5 * (y0 + y1));
      if (qv <= 0.0) {
        if (base_p.rectangle_mass(x0, x1, y0, y1) > 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      total += quad::integrate2d(
          [&](double x, double y) {
            const double p = base_p.eval(x, y);
            return (p > 0.0 ? p * std::log(p / qv) : 0.0) - p + qv;
          },
          x0, x1, y0, y1, 1e-11);
    }
  return total;
}

struct PhiStar {
  CoBlockParams phi;
  double value = 0.0;  // L_omega(phi) (pl) or R_omega(phi) (ls)
  IntervalPartition sigma = IntervalPartition::canonical_lower(0.5);
  IntervalPartition tau = IntervalPartition::canonical_lower(0.5);
};

/// Best two-class co-blockmodel approximation of omega. Enumerates
/// mu_0, nu_0 in {0, 1/G, ..., 1} and the canonical partitions, sets theta to
/// the block means of omega under each pair and keeps the best criterion.
/// Ties (within 1e-12 relative) keep the first in (mu, nu, sigma, tau) order.
inline PhiStar phi_star_search(const Kernel& kernel, std::size_t resolution = 100,
                               ObjectiveKind kind = ObjectiveKind::kProfileLikelihood, double eps = kDefaultEps) {
  if (resolution < 1) throw std::invalid_argument("phi_star_search: resolution must be >= 1");
  std::vector<IntervalPartition> family;
  family.reserve(2 * (resolution + 1));
  for (std::size_t k = 0; k <= resolution; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(resolution);
    family.push_back(IntervalPartition::canonical_lower(p));
    family.push_back(IntervalPartition::canonical_upper(p));
  }
  const PartitionMassOracle oracle(kernel, family, family);
  const double square = kind == ObjectiveKind::kLeastSquares ? kernel.square_integral() : 0.0;

  PhiStar best;
  bool have = false;
  std::size_t best_r = 0, best_c = 0;
  RealMatrix best_theta;
  for (std::size_t r = 0; r < family.size(); ++r)
    for (std::size_t c = 0; c < family.size(); ++c) {
      const double mu0 = family[r].measure(0), nu0 = family[c].measure(0);
      const auto mass = oracle.mass(r, c);
      const auto sizes = detail::block_sizes(mu0, nu0);
      RealMatrix theta(2, 2);
      for (std::size_t k = 0; k < 4; ++k) theta(k / 2, k % 2) = sizes[k] > 0.0 ? mass[k] / sizes[k] : 0.5;
      const double score = detail::pair_score(mass, sizes, theta, kind, eps);
      if (!have || score > best.value + 1e-12 * std::max(1.0, std::abs(best.value))) {
        best.value = score;
        best_r = r;
        best_c = c;
        best_theta = theta;
        have = true;
      }
    }
  const auto counts = [resolution](std::size_t k) {
    return ClassCounts({k, resolution - k});
  };
  for (double& v : best_theta.data()) v = std::clamp(v, 0.0, 1.0);
  best.phi = CoBlockParams(counts(best_r / 2), counts(best_c / 2), best_theta);
  best.sigma = family[best_r];
  best.tau = family[best_c];
  if (kind == ObjectiveKind::kLeastSquares) best.value = square - best.value;
  return best;
}

struct FidelityResult {
  double value = 0.0;
  IntervalPartition sigma = IntervalPartition::canonical_lower(0.5);
  IntervalPartition tau = IntervalPartition::canonical_lower(0.5);
};

/// Smallest discrepancy, over the canonical/threshold partition family with
/// class measures (mu_hat, nu_hat), between omega's block means and
/// theta_hat: sum mu nu D(mean || theta) (pl) or sum mu nu (mean - theta)^2 (ls).
inline FidelityResult cocluster_fidelity(const Kernel& kernel, const CoBlockParams& phi_hat, ObjectiveKind kind,
                                         std::size_t grid = 256, double eps = kDefaultEps) {
  if (phi_hat.mu.num_classes() != 2 || phi_hat.nu.num_classes() != 2)
    throw UnsupportedError("cocluster_fidelity: implemented for K = 2 only");
  const double mu0 = phi_hat.mu.proportion(0), nu0 = phi_hat.nu.proportion(0);
  const PartitionMassOracle oracle(kernel, threshold_family(mu0, grid), threshold_family(nu0, grid));
  const auto sizes = detail::block_sizes(mu0, nu0);
  FidelityResult best;
  bool have = false;
  for (std::size_t r = 0; r < oracle.rows().size(); ++r)
    for (std::size_t c = 0; c < oracle.cols().size(); ++c) {
      const auto mass = oracle.mass(r, c);
      double d = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        if (sizes[k] <= 0.0) continue;
        const double mean = std::clamp(mass[k] / sizes[k], 0.0, 1.0);
        const double th = phi_hat.theta(k / 2, k % 2);
        d += sizes[k] * (kind == ObjectiveKind::kLeastSquares ? (mean - th) * (mean - th) : bernoulli_kl(mean, th, eps));
      }
      if (!have || d < best.value) {
        best.value = d;
        best.sigma = oracle.rows()[r];
        best.tau = oracle.cols()[c];
        have = true;
      }
    }
  return best;
}

}  // namespace coclust
