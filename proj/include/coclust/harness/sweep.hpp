#pragma once

// Simulation sweep: sample, fit, and score against the best two-class
// approximation of each grid cell. One CSV row per (cell, rep, kind).

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "coclust/detail/parallel.hpp"
#include "coclust/detail/rng.hpp"
#include "coclust/fit.hpp"
#include "coclust/harness/config.hpp"
#include "coclust/io.hpp"
#include "coclust/kernels.hpp"
#include "coclust/risk.hpp"

namespace coclust::harness {

struct SweepRow {
  double beta = 0.0;
  RhoMode rho_mode = RhoMode::kDense;
  double rho_value = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  ObjectiveKind kind = ObjectiveKind::kProfileLikelihood;
  double objective = 0.0;        // empirical criterion at the fit (averaged over cells)
  double l_star = 0.0;           // population criterion of phi*
  double excess_risk_rel = 0.0;  // (L* - L(phi_hat)) / |L*|, or (R(phi_hat) - R*) / |R*| for ls
  double kl_normalized = 0.0;    // avg_kl(phi_hat) / rho
  double kl_limit = 0.0;         // small-rho limit of avg_kl(phi*) / rho
  double fidelity = 0.0;
  double runtime_ms = 0.0;
};

inline constexpr const char* kSweepHeader =
    "beta,rho_mode,rho_value,n,m,rep,seed,kind,objective,l_star,excess_risk_rel,kl_normalized,kl_limit,fidelity,"
    "runtime_ms";

/// Per-(beta, rho_mode, n) quantities shared by all reps of a cell.
struct CellCache {
  double beta = 0.0;
  RhoMode mode = RhoMode::kDense;
  std::size_t n = 0;
  double rho = 0.0;
  Kernel kernel = GridKernel::constant(0.0);
  double neg_entropy = 0.0;
  double kl_limit = 0.0;
  double kl_star = 0.0;  // avg_kl(phi*) / rho
  std::map<ObjectiveKind, PhiStar> phi_star;
  std::map<ObjectiveKind, double> l_star;
};

/// Seed of one replicate; depends on the cell's values, not its position in
/// the grid, so extending a grid keeps existing rows unchanged.
inline std::uint64_t replicate_seed(std::uint64_t seed, double beta, RhoMode mode, std::size_t n, std::size_t rep) {
  return derive_key(seed, {static_cast<std::uint64_t>(StreamRole::kReplicate), std::bit_cast<std::uint64_t>(beta),
                           static_cast<std::uint64_t>(mode), n, rep});
}

inline CellCache build_cell(const ExperimentConfig& config, double beta, RhoMode mode, std::size_t n) {
  CellCache cell;
  cell.beta = beta;
  cell.mode = mode;
  cell.n = n;
  cell.rho = rho_schedule(mode, n);
  cell.kernel = make_sigmoid_kernel(beta, cell.rho);
  cell.neg_entropy = cell.kernel.neg_entropy();
  const PopulationOptions pop{config.fit.eps, config.oracle_grid, false};
  for (auto kind : config.kinds) {
    auto star = phi_star_search(cell.kernel, config.phi_grid, kind, config.fit.eps);
    // Re-maximise over alignments so L* is the same functional applied to phi_hat.
    cell.l_star[kind] = population_risk(cell.kernel, star.phi, kind, pop).value;
    cell.phi_star.emplace(kind, std::move(star));
  }
  const PhiStar& star = cell.phi_star.count(ObjectiveKind::kProfileLikelihood)
                            ? cell.phi_star.at(ObjectiveKind::kProfileLikelihood)
                            : phi_star_search(cell.kernel, config.phi_grid, ObjectiveKind::kProfileLikelihood,
                                              config.fit.eps);
  cell.kl_star = avg_kl(cell.kernel, star.phi, pop, cell.neg_entropy) / cell.rho;
  RealMatrix base = star.phi.theta;
  for (double& v : base.data()) v /= cell.rho;
  cell.kl_limit = kl_small_rho_limit(make_sigmoid_kernel(beta, 1.0), CoBlockParams(star.phi.mu, star.phi.nu, base));
  return cell;
}

inline std::vector<SweepRow> run_replicate(const ExperimentConfig& config, const CellCache& cell, std::size_t rep) {
  const std::size_t n = cell.n;
  const std::size_t m = config.m_for(n);
  const std::uint64_t seed = replicate_seed(config.seed, cell.beta, cell.mode, n, rep);
  const PopulationOptions pop{config.fit.eps, config.oracle_grid, false};
  const auto sample = sample_bipartite(cell.kernel, m, n, seed);
  std::vector<SweepRow> rows;
  for (auto kind : config.kinds) {
    const auto start = std::chrono::steady_clock::now();
    FitConfig fc = config.fit;
    fc.seed = derive_key(seed, {static_cast<std::uint64_t>(StreamRole::kFitRestart)});
    const auto fit = fit_coblockmodel(sample.a, config.k, kind, fc, &sample.latents, nullptr);

    SweepRow row;
    row.beta = cell.beta;
    row.rho_mode = cell.mode;
    row.rho_value = cell.rho;
    row.n = n;
    row.m = m;
    row.rep = rep;
    row.seed = seed;
    row.kind = kind;
    row.objective = fit.objective;
    row.l_star = cell.l_star.at(kind);
    const double l_hat = population_risk(cell.kernel, fit.phi_hat, kind, pop).value;
    row.excess_risk_rel = kind == ObjectiveKind::kProfileLikelihood ? (row.l_star - l_hat) / std::abs(row.l_star)
                                                                    : (l_hat - row.l_star) / std::abs(row.l_star);
    row.kl_normalized = avg_kl(cell.kernel, fit.phi_hat, pop, cell.neg_entropy) / cell.rho;
    row.kl_limit = cell.kl_limit;
    row.fidelity = cocluster_fidelity(cell.kernel, fit.phi_hat, kind, config.fidelity_grid, config.fit.eps).value;
    if (config.record_runtime)
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

inline bool row_less(const SweepRow& a, const SweepRow& b) {
  return std::tie(a.beta, a.rho_mode, a.n, a.rep, a.kind) < std::tie(b.beta, b.rho_mode, b.n, b.rep, b.kind);
}

/// Runs every (cell, rep) concurrently; output order is independent of
/// scheduling.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.k != 2) throw UnsupportedError("run_sweep: population scoring is implemented for K = 2 only");
  std::vector<std::tuple<double, RhoMode, std::size_t>> cells;
  for (double b : config.betas)
    for (auto mode : config.rho_modes)
      for (auto n : config.n_grid) cells.emplace_back(b, mode, n);

  std::vector<CellCache> caches(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const auto& [b, mode, n] = cells[c];
    caches[c] = build_cell(config, b, mode, n);
  });

  std::vector<std::vector<SweepRow>> out(cells.size() * config.reps);
  parallel_for(out.size(), [&](std::size_t task) {
    out[task] = run_replicate(config, caches[task / config.reps], task % config.reps);
  });
  std::vector<SweepRow> rows;
  for (auto& r : out) rows.insert(rows.end(), r.begin(), r.end());
  std::stable_sort(rows.begin(), rows.end(), row_less);
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.beta) << ',' << to_string(r.rho_mode) << ',' << format_double(r.rho_value) << ',' << r.n
        << ',' << r.m << ',' << r.rep << ',' << r.seed << ',' << to_string(r.kind) << ',' << format_double(r.objective)
        << ',' << format_double(r.l_star) << ',' << format_double(r.excess_risk_rel) << ','
        << format_double(r.kl_normalized) << ',' << format_double(r.kl_limit) << ',' << format_double(r.fidelity)
        << ',' << format_double(r.runtime_ms) << '\n';
  }
}

inline void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_sweep_csv(out, rows);
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace coclust::harness
