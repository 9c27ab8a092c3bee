// coclust: sweeps, rate experiments, single fits, population oracles and
// CSV summaries from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coclust/coclust.hpp"
#include "coclust/harness/config.hpp"
#include "coclust/harness/rate.hpp"
#include "coclust/harness/summarize.hpp"
#include "coclust/harness/sweep.hpp"

namespace {

using namespace coclust;
using namespace coclust::harness;

std::string resolve_out(const std::string& flag, const ExperimentConfig& config) {
  if (!flag.empty()) return flag;
  if (!config.output.empty()) return config.output;
  throw std::invalid_argument("no output path: pass --out or set 'output' in the config");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag) {
  const auto config = load_config(config_path);
  const auto path = resolve_out(out_flag, config);
  const auto rows = run_sweep(config);
  write_csv_file(path, rows);
  std::cerr << "wrote " << rows.size() << " rows to " << path << '\n';
  return 0;
}

int cmd_rate(const std::string& config_path, const std::string& out_flag) {
  const auto config = load_config(config_path);
  const auto path = resolve_out(out_flag, config);
  const auto result = run_rate_experiment(config);
  auto out = open_out(path);
  write_rate_csv(out, result.rows);
  finish(out, path);
  write_rate_summary(std::cout, result.slopes);
  return 0;
}

int cmd_fit(const std::string& input, std::size_t k, const std::string& kind, std::uint64_t seed,
            const std::string& out_path, std::size_t restarts, const std::string& init) {
  const auto file = read_adjacency_file(input);
  FitConfig fc;
  fc.seed = seed;
  fc.restarts = restarts;
  fc.init = parse_init_strategy(init);
  std::optional<LatentSample> latents;
  if (file.xi && file.zeta) latents = LatentSample{*file.xi, *file.zeta, seed};
  if (fc.init == InitStrategy::kOracleLatent && !latents)
    throw std::invalid_argument("--init oracle_latent needs latent positions in the adjacency file");
  if (fc.init == InitStrategy::kProvided) throw std::invalid_argument("--init provided is not available here");
  const auto fit = fit_coblockmodel(file.a, k, parse_objective_kind(kind), fc, latents ? &*latents : nullptr);
  auto out = open_out(out_path);
  write_fit_record(out, fit);
  finish(out, out_path);
  std::cerr << "objective " << format_double(fit.objective) << '\n';
  return 0;
}

int cmd_oracle(double beta, double rho, std::size_t grid) {
  const Kernel kernel = make_sigmoid_kernel(beta, rho);
  const auto star = phi_star_search(kernel, grid);
  const auto l_star = population_risk(kernel, star.phi, ObjectiveKind::kProfileLikelihood).value;
  RealMatrix base = star.phi.theta;
  for (double& v : base.data()) v /= rho;
  const double limit = kl_small_rho_limit(make_sigmoid_kernel(beta, 1.0), CoBlockParams(star.phi.mu, star.phi.nu, base));
  const auto& th = star.phi.theta;
  std::cout << "mu " << format_double(star.phi.mu.proportion(0)) << ' ' << format_double(star.phi.mu.proportion(1))
            << '\n'
            << "nu " << format_double(star.phi.nu.proportion(0)) << ' ' << format_double(star.phi.nu.proportion(1))
            << '\n'
            << "theta " << format_double(th(0, 0)) << ' ' << format_double(th(0, 1)) << ' ' << format_double(th(1, 0))
            << ' ' << format_double(th(1, 1)) << '\n'
            << "sigma " << star.sigma.describe() << '\n'
            << "tau " << star.tau.describe() << '\n'
            << "L_star " << format_double(l_star) << '\n'
            << "kl_normalized " << format_double(avg_kl(kernel, star.phi) / rho) << '\n'
            << "kl_limit " << format_double(limit) << '\n';
  if (!kernel.exact_separable()) std::cout << "note kernel is clamped; values use the threshold-grid approximation\n";
  return 0;
}

int cmd_summarize(const std::string& in, const std::string& by, const std::string& out_path) {
  std::vector<std::string> keys;
  std::stringstream ss(by);
  for (std::string k; std::getline(ss, k, ',');)
    if (!k.empty()) keys.push_back(k);
  const auto summary = summarize(read_csv_file(in), keys);
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
  if (out_path.empty()) {
    write_summary_csv(std::cout, summary);
  } else {
    auto out = open_out(out_path);
    write_summary_csv(out, summary);
    finish(out, out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-blockmodel estimation and simulation tools"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  auto* sweep = app.add_subcommand("sweep", "run a simulation sweep and write one CSV row per replicate");
  sweep->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_path, "output CSV (overrides 'output' in the config)");

  auto* rate = app.add_subcommand("rate", "support-function convergence experiment");
  rate->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  rate->add_option("--out", out_path, "output CSV (overrides 'output' in the config)");

  std::string input, kind = "pl", init = "random";
  std::size_t k = 2, restarts = 8;
  std::uint64_t seed = 0;
  auto* fit = app.add_subcommand("fit", "fit a co-blockmodel to an adjacency file");
  fit->add_option("--input", input, "adjacency file")->required()->check(CLI::ExistingFile);
  fit->add_option("--k", k, "number of classes")->required()->check(CLI::PositiveNumber);
  fit->add_option("--kind", kind, "objective: ls or pl")->check(CLI::IsMember({"ls", "pl"}));
  fit->add_option("--seed", seed, "random seed");
  fit->add_option("--out", out_path, "fit record path")->required();
  fit->add_option("--restarts", restarts, "annealing restarts")->check(CLI::PositiveNumber);
  fit->add_option("--init", init, "random or oracle_latent")->check(CLI::IsMember({"random", "oracle_latent"}));

  double beta = 3.0, rho = 0.5;
  std::size_t grid = 100;
  auto* oracle = app.add_subcommand("oracle", "best two-class approximation of the sigmoid kernel");
  oracle->add_option("--beta", beta, "kernel steepness (>= 1)")->required();
  oracle->add_option("--rho", rho, "density scale in (0, 1]")->required();
  oracle->add_option("--grid", grid, "class-proportion resolution")->check(CLI::PositiveNumber);

  std::string in, by;
  auto* summ = app.add_subcommand("summarize", "median and IQR per group of a sweep or rate CSV");
  summ->add_option("--in", in, "input CSV")->required()->check(CLI::ExistingFile);
  summ->add_option("--by", by, "comma-separated grouping columns")->required();
  summ->add_option("--out", out_path, "output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return cmd_sweep(config_path, out_path);
    if (*rate) return cmd_rate(config_path, out_path);
    if (*fit) return cmd_fit(input, k, kind, seed, out_path, restarts, init);
    if (*oracle) return cmd_oracle(beta, rho, grid);
    if (*summ) return cmd_summarize(in, by, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
