#pragma once

// Line-oriented `key = value` experiment configuration.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coclust/fit.hpp"
#include "coclust/kernels.hpp"
#include "coclust/risk.hpp"

namespace coclust::harness {

struct ExperimentConfig {
  std::vector<double> betas{3.0};
  std::vector<RhoMode> rho_modes{RhoMode::kDense};
  std::vector<std::size_t> n_grid{100};
  /// m = round(aspect * n).
  double aspect = 1.0;
  std::size_t reps = 50;
  std::uint64_t seed = 1;
  std::vector<ObjectiveKind> kinds{ObjectiveKind::kProfileLikelihood};
  std::size_t k = 2;
  FitConfig fit = [] {
    FitConfig f;
    f.init = InitStrategy::kOracleLatent;
    return f;
  }();
  std::size_t phi_grid = 100;
  std::size_t fidelity_grid = 256;
  std::size_t oracle_grid = 256;
  // rate experiment
  std::size_t directions = 20;
  std::size_t support_restarts = 32;
  double mu0 = 0.5;
  double nu0 = 0.5;
  bool record_runtime = false;
  std::string output;

  void validate() const {
    if (betas.empty() || rho_modes.empty() || n_grid.empty() || kinds.empty())
      throw std::invalid_argument("config: betas, rho_modes, n_grid and kinds must be nonempty");
    if (reps < 1) throw std::invalid_argument("config: reps must be >= 1");
    if (!(aspect > 0.0)) throw std::invalid_argument("config: aspect must be > 0");
    for (auto n : n_grid)
      if (n < 2) throw std::invalid_argument("config: every n must be >= 2");
    for (double b : betas)
      if (!(b >= 1.0)) throw std::invalid_argument("config: every beta must be >= 1");
    if (!(mu0 > 0.0 && mu0 < 1.0 && nu0 > 0.0 && nu0 < 1.0))
      throw std::invalid_argument("config: mu0 and nu0 must lie in (0, 1)");
    fit.validate();
  }

  std::size_t m_for(std::size_t n) const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(aspect * static_cast<double>(n))));
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& value, F&& parse) {
  std::vector<T> out;
  for (const auto& tok : split_list(value)) {
    try {
      out.push_back(parse(tok));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config: bad value '" + tok + "' for '" + key + "': " + e.what());
    }
  }
  if (out.empty()) throw std::invalid_argument("config: '" + key + "' needs at least one value");
  return out;
}

inline double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not a number");
  return v;
}

inline std::uint64_t to_u64(const std::string& s) {
  if (s.empty() || s[0] == '-') throw std::invalid_argument("not a nonnegative integer");
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer");
  return v;
}

inline bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("not a boolean");
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment. Unknown keys are errors.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    auto one = [&](auto parse) {
      const auto v = detail::parse_list<decltype(parse(std::string{}))>(key, value, parse);
      if (v.size() != 1) throw std::invalid_argument("config: '" + key + "' takes a single value");
      return v.front();
    };
    try {
      if (key == "betas") c.betas = detail::parse_list<double>(key, value, detail::to_double);
      else if (key == "rho_modes") c.rho_modes = detail::parse_list<RhoMode>(key, value, [](const std::string& s) { return parse_rho_mode(s); });
      else if (key == "n_grid") c.n_grid = detail::parse_list<std::size_t>(key, value, detail::to_u64);
      else if (key == "aspect_rho_mn" || key == "aspect") c.aspect = one(detail::to_double);
      else if (key == "reps") c.reps = one(detail::to_u64);
      else if (key == "seed") c.seed = one(detail::to_u64);
      else if (key == "kinds") c.kinds = detail::parse_list<ObjectiveKind>(key, value, [](const std::string& s) { return parse_objective_kind(s); });
      else if (key == "k") c.k = one(detail::to_u64);
      else if (key == "restarts") c.fit.restarts = one(detail::to_u64);
      else if (key == "anneal_steps") c.fit.anneal_steps = one(detail::to_u64);
      else if (key == "initial_temperature") c.fit.initial_temperature = one(detail::to_double);
      else if (key == "cooling_rate") c.fit.cooling_rate = one(detail::to_double);
      else if (key == "eps") c.fit.eps = one(detail::to_double);
      else if (key == "init") c.fit.init = one([](const std::string& s) { return parse_init_strategy(s); });
      else if (key == "moves") {
        const auto moves = detail::split_list(value);
        c.fit.single_relabel = std::find(moves.begin(), moves.end(), "single_relabel") != moves.end();
        c.fit.pair_swap = std::find(moves.begin(), moves.end(), "pair_swap") != moves.end();
        for (const auto& mv : moves)
          if (mv != "single_relabel" && mv != "pair_swap")
            throw std::invalid_argument("config: unknown move '" + mv + "'");
      }
      else if (key == "phi_grid") c.phi_grid = one(detail::to_u64);
      else if (key == "fidelity_grid") c.fidelity_grid = one(detail::to_u64);
      else if (key == "oracle_grid") c.oracle_grid = one(detail::to_u64);
      else if (key == "directions") c.directions = one(detail::to_u64);
      else if (key == "support_restarts") c.support_restarts = one(detail::to_u64);
      else if (key == "mu0") c.mu0 = one(detail::to_double);
      else if (key == "nu0") c.nu0 = one(detail::to_double);
      else if (key == "record_runtime") c.record_runtime = one(detail::to_bool);
      else if (key == "output") c.output = value;
      else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("config: value out of range for '" + key + "'");
    }
  }
  if (c.fit.init == InitStrategy::kProvided)
    throw std::invalid_argument("config: init = provided is not available in sweeps");
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace coclust::harness
