// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coclust/coclust.hpp"
#include "coclust/harness/rate.hpp"
#include "coclust/harness/sweep.hpp"
#include "oracles.hpp"

using namespace coclust;
using namespace coclust::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<std::size_t> random_counts(std::size_t size, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(1, size - 1);
  const auto c0 = d(rng);
  return {c0, size - c0};
}

// 1. Alternating support vs exhaustive enumeration.
Outcome support_equivalence() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  std::uniform_real_distribution<double> dens(0.2, 0.8);
  int equal = 0, above = 0;
  const int trials = 200;
  double worst_gap = 0.0;
  for (int k = 0; k < trials; ++k) {
    const std::size_t m = dim(rng), n = dim(rng);
    const auto a = oracle::random_binary(m, n, dens(rng), rng);
    const auto mu = random_counts(m, rng), nu = random_counts(n, rng);
    const auto gamma = oracle::random_matrix(2, 2, -1.0, 1.0, rng);
    const double exact = oracle::brute_support(a, mu, nu, gamma);
    const double alt = support_empirical(a, ClassCounts(mu), ClassCounts(nu), gamma,
                                         {SupportMethod::kAlternating, 32, static_cast<std::uint64_t>(k)})
                           .value;
    if (std::abs(alt - exact) <= 1e-12) ++equal;
    if (alt > exact + 1e-12) ++above;
    worst_gap = std::max(worst_gap, exact - alt);
  }
  std::ostringstream os;
  os << equal << "/" << trials << " equal, " << above << " above exact, worst shortfall " << worst_gap;
  return {equal >= 0.99 * trials && above == 0, os.str()};
}

// 2. Lipschitz properties of <Gamma, A/ST>.
Outcome lipschitz() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> dim(1, 20);
  std::uniform_int_distribution<int> kdist(2, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int fail1 = 0, fail3 = 0;
  auto random_labels = [&](std::size_t len, int k) {
    std::uniform_int_distribution<int> d(0, k - 1);
    std::vector<int> l(len);
    for (auto& v : l) v = d(rng);
    return Labeling(l, k);
  };
  auto perturb = [&](const Labeling& s, double rate) {
    auto l = s.labels();
    std::uniform_int_distribution<int> d(0, static_cast<int>(s.num_classes()) - 1);
    for (auto& v : l)
      if (u(rng) < rate) v = d(rng);
    return Labeling(l, s.num_classes());
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = dim(rng), n = dim(rng);
    const int k = kdist(rng);
    const auto a = oracle::random_binary(m, n, u(rng), rng);
    const auto gamma = oracle::random_matrix(k, k, -1.0, 1.0, rng);
    const auto s = random_labels(m, k), t = random_labels(n, k);
    const auto s2 = perturb(s, u(rng)), t2 = perturb(t, u(rng));
    const double lhs = std::abs(support_inner(a, s, t, gamma) - support_inner(a, s2, t2, gamma));
    if (lhs > 2.0 * (hamming_normalized(s, s2) + hamming_normalized(t, t2))) ++fail1;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = dim(rng), n = dim(rng);
    const int k = kdist(rng);
    auto a = oracle::random_binary(m, n, u(rng), rng);
    const auto gamma = oracle::random_matrix(k, k, -1.0, 1.0, rng);
    const auto s = random_labels(m, k), t = random_labels(n, k);
    const double before = support_inner(a, s, t, gamma);
    const std::size_t i = rng() % m, j = rng() % n;
    a(i, j) = a(i, j) ? 0 : 1;
    if (std::abs(support_inner(a, s, t, gamma) - before) > 1.0 / static_cast<double>(m * n)) ++fail3;
  }
  return {fail1 == 0 && fail3 == 0,
          "(1) violations " + std::to_string(fail1) + "/1000, (3) violations " + std::to_string(fail3) + "/1000"};
}

double weighted(const std::vector<double>& mu, const std::vector<double>& nu, const RealMatrix& v) {
  double s = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) s += mu[a] * nu[b] * v(a, b);
  return s;
}

// 3. Risk identities via support functions, empirical and population.
Outcome risk_identity() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> dim(3, 6);
  std::uniform_real_distribution<double> beta_d(2.0, 8.0), rho_d(0.1, 1.0), mu_d(0.1, 0.9);
  const double eps = kDefaultEps;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double beta = beta_d(rng), rho = rho_d(rng);
    const Kernel kernel = make_sigmoid_kernel(beta, rho);
    if (!kernel.exact_separable()) return {false, "random kernel unexpectedly clamped"};
    const std::size_t m = dim(rng), n = dim(rng);
    const auto sample = sample_bipartite(kernel, m, n, rng());
    const auto mu = random_counts(m, rng), nu = random_counts(n, rng);
    const auto theta = oracle::random_matrix(2, 2, 0.02, 0.98, rng);
    const ClassCounts cmu(mu), cnu(nu);
    const auto mup = cmu.proportions(), nup = cnu.proportions();
    const auto [b, gamma] = b_and_gamma(theta, eps);
    RealMatrix log1m(2, 2), sq(2, 2);
    for (std::size_t x = 0; x < 4; ++x) {
      log1m.data()[x] = std::log(1.0 - clamp_probability(theta.data()[x], eps));
      sq.data()[x] = theta.data()[x] * theta.data()[x];
    }
    const SupportOptions exact{SupportMethod::kExact, 0, 0};
    double mean = 0.0;
    for (auto v : sample.a.data()) mean += v;
    mean /= static_cast<double>(m * n);

    const double ls_emp = weighted(mup, nup, sq) - 2.0 * support_empirical(sample.a, cmu, cnu, theta, exact).value + mean;
    const double pl_emp = b * support_empirical(sample.a, cmu, cnu, gamma, exact).value + weighted(mup, nup, log1m);
    worst = std::max(worst, std::abs(ls_emp - oracle::brute_objective(sample.a, mu, nu, theta, false, eps)));
    worst = std::max(worst, std::abs(pl_emp - oracle::brute_objective(sample.a, mu, nu, theta, true, eps)));

    const double mu0 = mu_d(rng), nu0 = mu_d(rng);
    const std::vector<double> pm{mu0, 1 - mu0}, pn{nu0, 1 - nu0};
    const OracleOptions strict{true, 0};
    const double ls_pop =
        weighted(pm, pn, sq) - 2.0 * support_oracle(kernel, pm, pn, theta, strict).value + kernel.square_integral();
    const double pl_pop = b * support_oracle(kernel, pm, pn, gamma, strict).value + weighted(pm, pn, log1m);
    const oracle::Separable sep(beta, rho);
    worst = std::max(worst, std::abs(ls_pop - oracle::grid_population(sep, mu0, nu0, theta, false, 40, eps)));
    worst = std::max(worst, std::abs(pl_pop - oracle::grid_population(sep, mu0, nu0, theta, true, 40, eps)));
  }
  std::ostringstream os;
  os << "max |identity - direct| = " << worst << " over 100 triples (tol 1e-9)";
  return {worst <= 1e-9, os.str()};
}

// 4. Four-case population risk vs 200 x 200 threshold-grid search.
Outcome four_case_vs_grid() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> mu_d(0.1, 0.9);
  double worst = 0.0;
  for (double beta : {3.0, 5.0}) {
    const Kernel kernel = make_sigmoid_kernel(beta, 0.5);
    const oracle::Separable sep(beta, 0.5);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t g = 1000;
      const auto c0 = static_cast<std::size_t>(mu_d(rng) * g), d0 = static_cast<std::size_t>(mu_d(rng) * g);
      const CoBlockParams phi(ClassCounts({c0, g - c0}), ClassCounts({d0, g - d0}),
                              oracle::random_matrix(2, 2, 0.02, 0.98, rng));
      const double mu0 = phi.mu.proportion(0), nu0 = phi.nu.proportion(0);
      for (bool pl : {false, true}) {
        const auto kind = pl ? ObjectiveKind::kProfileLikelihood : ObjectiveKind::kLeastSquares;
        const double four = population_risk(kernel, phi, kind, {kDefaultEps, 256, true}).value;
        const double grid = oracle::grid_population(sep, mu0, nu0, phi.theta, pl, 200);
        worst = std::max(worst, std::abs(four - grid));
      }
    }
  }
  std::ostringstream os;
  os << "max |four-case - grid| = " << worst << " over 200 comparisons (tol 1e-6)";
  return {worst <= 1e-6, os.str()};
}

// 5. phi* of the dense sigmoid kernel.
Outcome phi_star() {
  double worst = 0.0;
  bool halves = true;
  const RealMatrix expected{{0.375, 0.125}, {0.125, 0.375}};
  for (double beta : {3.0, 5.0}) {
    const auto star = phi_star_search(make_sigmoid_kernel(beta, 0.5), 100);
    halves = halves && std::abs(star.phi.mu.proportion(0) - 0.5) < 1e-15 &&
             std::abs(star.phi.nu.proportion(0) - 0.5) < 1e-15;
    for (std::size_t x = 0; x < 4; ++x)
      worst = std::max(worst, std::abs(star.phi.theta.data()[x] - expected.data()[x]));
  }
  std::ostringstream os;
  os << "mu = nu = (1/2, 1/2): " << (halves ? "yes" : "no") << ", max |theta - theta*| = " << worst;
  return {halves && worst <= 1e-8, os.str()};
}

// 6. Qualitative Figure 1 shape.
Outcome figure_one() {
  ExperimentConfig c;
  c.betas = {3.0, 5.0};
  c.rho_modes = {RhoMode::kDense};
  c.n_grid = {100, 200, 400};
  c.reps = 50;
  c.seed = 20240601;
  c.kinds = {ObjectiveKind::kProfileLikelihood};
  c.fit.init = InitStrategy::kOracleLatent;
  const auto rows = run_sweep(c);
  std::map<double, double> kl_star;
  for (double beta : c.betas) {
    const Kernel k = make_sigmoid_kernel(beta, 0.5);
    kl_star[beta] = avg_kl(k, phi_star_search(k, 100).phi) / 0.5;
  }
  std::map<double, std::map<std::size_t, std::vector<double>>> excess, klgap;
  for (const auto& r : rows) {
    excess[r.beta][r.n].push_back(r.excess_risk_rel);
    klgap[r.beta][r.n].push_back(std::abs(r.kl_normalized - kl_star[r.beta]));
  }
  bool ok = true;
  std::ostringstream os;
  for (double beta : c.betas) {
    std::vector<double> e, k;
    for (auto n : c.n_grid) {
      e.push_back(median_of(excess[beta][n]));
      k.push_back(median_of(klgap[beta][n]));
    }
    const bool dec = e[0] > e[1] && e[1] > e[2] && e[2] < 0.5 * e[0] && k[0] > k[1] && k[1] > k[2];
    ok = ok && dec;
    os << "beta=" << beta << " excess " << e[0] << " > " << e[1] << " > " << e[2] << ", |kl - kl*| " << k[0] << " > "
       << k[1] << " > " << k[2] << "; ";
  }
  return {ok, os.str()};
}

// 7. Support-function rate envelope.
Outcome rate_envelope() {
  ExperimentConfig c;
  c.betas = {3.0};
  c.rho_modes = {RhoMode::kDense};
  c.n_grid = {64, 128, 256, 512};
  c.reps = 50;
  c.seed = 7;
  c.directions = 20;
  c.support_restarts = 32;
  const auto res = run_rate_experiment(c);
  const auto& s = res.slopes.at(0);
  std::ostringstream os;
  os << "slope " << s.slope << " (medians";
  for (double v : s.median) os << " " << v;
  os << ")";
  return {s.slope <= -0.2, os.str()};
}

// 8. Small-rho limit of the normalized KL.
Outcome taylor_limit() {
  const double rho = 1e-3;
  double worst = 0.0;
  std::ostringstream os;
  for (double beta : {3.0, 5.0}) {
    const Kernel k = make_sigmoid_kernel(beta, rho);
    const auto star = phi_star_search(k, 100);
    const double lhs = avg_kl(k, star.phi) / rho;
    RealMatrix base = star.phi.theta;
    for (double& v : base.data()) v /= rho;
    const double rhs = kl_small_rho_limit(make_sigmoid_kernel(beta, 1.0), CoBlockParams(star.phi.mu, star.phi.nu, base));
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    os << "beta=" << beta << " " << lhs << " vs " << rhs << "; ";
  }
  os << "max rel diff " << worst;
  return {worst <= 0.01, os.str()};
}

// 9. Byte-identical sweep output.
Outcome determinism() {
  ExperimentConfig c;
  c.betas = {3.0, 5.0};
  c.rho_modes = {RhoMode::kDense, RhoMode::kPolylog};
  c.n_grid = {60, 100};
  c.reps = 5;
  c.seed = 99;
  c.kinds = {ObjectiveKind::kProfileLikelihood, ObjectiveKind::kLeastSquares};
  c.fit.init = InitStrategy::kRandom;
  c.fit.restarts = 2;
  auto render = [&] {
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(c));
    return os.str();
  };
  const auto first = render();
  const auto second = render();
  return {first == second && !first.empty(),
          std::to_string(first.size()) + " bytes, identical: " + (first == second ? "yes" : "no")};
}

// 10. Planted two-block model recovery.
Outcome planted() {
  const CoBlockParams phi(ClassCounts({1, 1}), ClassCounts({1, 1}), RealMatrix{{0.9, 0.1}, {0.1, 0.9}});
  const Kernel kernel = BlockKernel(phi);
  int good = 0;
  double worst = 1.0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto sample = sample_bipartite(kernel, 100, 100, 1000 + seed);
    FitConfig fc;
    fc.seed = static_cast<std::uint64_t>(seed);
    const auto fit = fit_coblockmodel(sample.a, 2, ObjectiveKind::kProfileLikelihood, fc);
    auto truth = [](const std::vector<double>& v) {
      std::vector<int> l(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) l[i] = v[i] < 0.5 ? 0 : 1;
      return Labeling(l, 2);
    };
    const double acc = std::min(label_accuracy(fit.s, truth(sample.latents.xi)),
                                label_accuracy(fit.t, truth(sample.latents.zeta)));
    worst = std::min(worst, acc);
    if (acc >= 0.99) ++good;
  }
  std::ostringstream os;
  os << good << "/100 seeds at >= 99% accuracy, worst " << worst;
  return {good >= 95, os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "alternating support equals exhaustive enumeration", 60, support_equivalence},
      {2, "Lipschitz inequalities of block summaries", 30, lipschitz},
      {3, "support-function risk identities", 120, risk_identity},
      {4, "four-case population risk vs threshold grid", 120, four_case_vs_grid},
      {5, "best two-class approximation of the sigmoid kernel", 60, phi_star},
      {6, "excess risk and KL decay with n", 900, figure_one},
      {7, "support-function gap rate", 900, rate_envelope},
      {8, "small-rho KL limit", 60, taylor_limit},
      {9, "sweep determinism", 300, determinism},
      {10, "planted-model label recovery", 300, planted},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d: %s -- %s [%.1fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
