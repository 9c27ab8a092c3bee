#pragma once

// Empirical support-function convergence: per (n, rep), the largest gap
// |h^A - h^omega| over sampled directions, plus a log-log slope of medians.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "coclust/cocluster.hpp"
#include "coclust/detail/parallel.hpp"
#include "coclust/detail/rng.hpp"
#include "coclust/harness/config.hpp"
#include "coclust/harness/sweep.hpp"
#include "coclust/io.hpp"
#include "coclust/kernels.hpp"
#include "coclust/types.hpp"

namespace coclust::harness {

struct RateRow {
  double beta = 0.0;
  RhoMode rho_mode = RhoMode::kDense;
  double rho_value = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::size_t directions = 0;  // including identity and all-ones
  double sup_gap = 0.0;
};

struct RateSlope {
  double beta = 0.0;
  RhoMode rho_mode = RhoMode::kDense;
  std::vector<std::size_t> n;
  std::vector<double> median;
  double slope = 0.0;
};

struct RateResult {
  std::vector<RateRow> rows;
  std::vector<RateSlope> slopes;
};

inline constexpr const char* kRateHeader = "beta,rho_mode,rho_value,n,m,rep,seed,directions,sup_gap";

/// Direction j of a replicate. Depends only on (seed, j), so a larger
/// direction budget is a superset of a smaller one.
inline Direction random_direction(std::uint64_t seed, std::size_t j, std::size_t k = 2) {
  CounterStream rng(seed, StreamRole::kDirection, j);
  RealMatrix g(k, k);
  for (double& v : g.data()) v = 2.0 * rng.uniform() - 1.0;
  return Direction(std::move(g));
}

/// The d random directions followed by the identity and all-ones.
inline std::vector<Direction> rate_directions(std::uint64_t seed, std::size_t d) {
  std::vector<Direction> out;
  out.reserve(d + 2);
  for (std::size_t j = 0; j < d; ++j) out.push_back(random_direction(seed, j));
  out.push_back(Direction::identity(2));
  out.push_back(Direction::ones(2));
  return out;
}

inline ClassCounts two_class_counts(double p0, std::size_t size) {
  auto c0 = static_cast<std::size_t>(std::llround(p0 * static_cast<double>(size)));
  c0 = std::clamp<std::size_t>(c0, 1, size - 1);
  return ClassCounts({c0, size - c0});
}

/// max over directions of |h^A(Gamma) - h^omega(Gamma)|. The population side
/// uses the realised class proportions so both sides range over the same
/// simplex point.
inline double sup_support_gap(const BinaryMatrix& a, const Kernel& kernel, const ClassCounts& mu,
                              const ClassCounts& nu, const std::vector<Direction>& directions,
                              const SupportOptions& options, std::size_t oracle_grid = 256) {
  double worst = 0.0;
  for (const auto& d : directions) {
    const double ha = support_empirical(a, mu, nu, d.matrix(), options).value;
    const double hw = support_oracle(kernel, mu.proportions(), nu.proportions(), d.matrix(), {false, oracle_grid}).value;
    worst = std::max(worst, std::abs(ha - hw));
  }
  return worst;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median_of: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline RateResult run_rate_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.k != 2) throw UnsupportedError("run_rate_experiment: K = 2 only");
  if (!std::is_sorted(config.n_grid.begin(), config.n_grid.end()))
    throw std::invalid_argument("run_rate_experiment: n_grid must be sorted ascending");

  std::vector<std::tuple<double, RhoMode, std::size_t>> cells;
  for (double b : config.betas)
    for (auto mode : config.rho_modes) {
      const Kernel probe = make_sigmoid_kernel(b, rho_schedule(mode, config.n_grid.front()));
      if (!probe.exact_separable())
        throw UnsupportedError("run_rate_experiment: kernel with beta = " + format_double(b) +
                               " is clamped; the population support is only exact for unclamped kernels");
      for (auto n : config.n_grid) cells.emplace_back(b, mode, n);
    }

  RateResult result;
  result.rows.resize(cells.size() * config.reps);
  parallel_for(result.rows.size(), [&](std::size_t task) {
    const auto& [beta, mode, n] = cells[task / config.reps];
    const std::size_t rep = task % config.reps;
    RateRow row;
    row.beta = beta;
    row.rho_mode = mode;
    row.rho_value = rho_schedule(mode, n);
    row.n = n;
    row.m = config.m_for(n);
    row.rep = rep;
    row.seed = replicate_seed(config.seed, beta, mode, n, rep);
    const Kernel kernel = make_sigmoid_kernel(beta, row.rho_value);
    const auto sample = sample_bipartite(kernel, row.m, n, row.seed);
    const auto dirs = rate_directions(row.seed, config.directions);
    row.directions = dirs.size();
    const SupportOptions opts{SupportMethod::kAlternating, config.support_restarts,
                              derive_key(row.seed, {static_cast<std::uint64_t>(StreamRole::kSupportRestart)})};
    row.sup_gap = sup_support_gap(sample.a, kernel, two_class_counts(config.mu0, row.m),
                                  two_class_counts(config.nu0, n), dirs, opts, config.oracle_grid);
    result.rows[task] = row;
  });

  std::map<std::pair<double, RhoMode>, std::map<std::size_t, std::vector<double>>> groups;
  for (const auto& r : result.rows) groups[{r.beta, r.rho_mode}][r.n].push_back(r.sup_gap);
  for (const auto& [key, by_n] : groups) {
    RateSlope s;
    s.beta = key.first;
    s.rho_mode = key.second;
    std::vector<double> xs;
    for (const auto& [n, gaps] : by_n) {
      s.n.push_back(n);
      s.median.push_back(median_of(gaps));
      xs.push_back(static_cast<double>(n));
    }
    s.slope = s.n.size() >= 2 ? loglog_slope(xs, s.median) : std::nan("");
    result.slopes.push_back(std::move(s));
  }
  return result;
}

inline void write_rate_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << kRateHeader << '\n';
  for (const auto& r : rows)
    out << format_double(r.beta) << ',' << to_string(r.rho_mode) << ',' << format_double(r.rho_value) << ',' << r.n
        << ',' << r.m << ',' << r.rep << ',' << r.seed << ',' << r.directions << ',' << format_double(r.sup_gap)
        << '\n';
}

inline void write_rate_summary(std::ostream& out, const std::vector<RateSlope>& slopes) {
  for (const auto& s : slopes) {
    out << "beta=" << format_double(s.beta) << " rho_mode=" << to_string(s.rho_mode) << " slope="
        << format_double(s.slope) << '\n';
    for (std::size_t i = 0; i < s.n.size(); ++i)
      out << "  n=" << s.n[i] << " median_sup_gap=" << format_double(s.median[i]) << '\n';
  }
}

}  // namespace coclust::harness
