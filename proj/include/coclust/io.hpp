#pragma once

// Plain-text formats: adjacency files (with optional latents), labeling
// lines, and fit records.

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coclust/detail/matrix.hpp"
#include "coclust/fit.hpp"
#include "coclust/kernels.hpp"
#include "coclust/types.hpp"

namespace coclust {

/// Shortest round-trip decimal ("%.17g").
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct AdjacencyFile {
  BinaryMatrix a;
  std::optional<std::vector<double>> xi;
  std::optional<std::vector<double>> zeta;
};

/// Line 1 "m n", then m lines of n characters from {0,1}; optionally two
/// more lines holding whitespace-separated row and column latents.
inline void write_adjacency(std::ostream& out, const BinaryMatrix& a, const LatentSample* latents = nullptr) {
  out << a.rows() << ' ' << a.cols() << '\n';
  std::string line(a.cols(), '0');
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) line[j] = a(i, j) ? '1' : '0';
    out << line << '\n';
  }
  if (latents != nullptr) {
    auto emit = [&](const std::vector<double>& v) {
      for (std::size_t k = 0; k < v.size(); ++k) out << (k ? " " : "") << format_double(v[k]);
      out << '\n';
    };
    emit(latents->xi);
    emit(latents->zeta);
  }
}

inline AdjacencyFile read_adjacency(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    if (required) throw std::runtime_error("adjacency: unexpected end of file after line " + std::to_string(line_no));
    return false;
  };
  next_line(true);
  std::istringstream header(line);
  long m = 0, n = 0;
  if (!(header >> m >> n) || m < 1 || n < 1)
    throw std::runtime_error("adjacency: line 1 must be \"m n\" with positive integers");
  AdjacencyFile out;
  out.a = BinaryMatrix(static_cast<std::size_t>(m), static_cast<std::size_t>(n), 0);
  for (long i = 0; i < m; ++i) {
    next_line(true);
    if (line.size() != static_cast<std::size_t>(n))
      throw std::runtime_error("adjacency: line " + std::to_string(line_no) + " has " + std::to_string(line.size()) +
                               " characters, expected " + std::to_string(n));
    for (long j = 0; j < n; ++j) {
      const char c = line[static_cast<std::size_t>(j)];
      if (c != '0' && c != '1')
        throw std::runtime_error("adjacency: line " + std::to_string(line_no) + " contains '" + std::string(1, c) + "'");
      out.a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = c == '1';
    }
  }
  auto read_floats = [&](std::size_t expected, const char* what) {
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (v.size() != expected)
      throw std::runtime_error(std::string("adjacency: ") + what + " line has " + std::to_string(v.size()) +
                               " values, expected " + std::to_string(expected));
    return v;
  };
  if (next_line(false)) {
    out.xi = read_floats(out.a.rows(), "row latent");
    next_line(true);
    out.zeta = read_floats(out.a.cols(), "column latent");
  }
  return out;
}

inline AdjacencyFile read_adjacency_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open adjacency file '" + path + "'");
  return read_adjacency(in);
}

/// Whitespace-separated 1-based class ids.
inline std::string labeling_line(const Labeling& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s[i] + 1);
  }
  return out;
}

inline Labeling parse_labeling_line(const std::string& line, std::size_t k) {
  std::istringstream in(line);
  std::vector<int> labels;
  int v;
  while (in >> v) labels.push_back(v - 1);
  return Labeling(std::move(labels), k);
}

/// Fit record: K, kind, objective, mu and nu counts, theta row-major, then
/// the S and T labelings.
inline void write_fit_record(std::ostream& out, const FitResult& fit) {
  const auto& phi = fit.phi_hat;
  out << "K " << phi.mu.num_classes() << '\n';
  out << "kind " << to_string(fit.kind) << '\n';
  out << "objective " << format_double(fit.objective) << '\n';
  out << "mu";
  for (auto c : phi.mu.counts()) out << ' ' << c;
  out << "\nnu";
  for (auto c : phi.nu.counts()) out << ' ' << c;
  out << "\ntheta";
  for (double t : phi.theta.data()) out << ' ' << format_double(t);
  out << "\nS " << labeling_line(fit.s) << '\n';
  out << "T " << labeling_line(fit.t) << '\n';
}

inline FitResult read_fit_record(std::istream& in) {
  FitResult fit;
  std::string line;
  std::size_t k = 0;
  std::vector<std::size_t> mu, nu;
  std::vector<double> theta;
  std::string s_line, t_line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    std::istringstream vs(rest);
    if (key == "K") {
      vs >> k;
    } else if (key == "kind") {
      std::string kind;
      vs >> kind;
      fit.kind = parse_objective_kind(kind);
    } else if (key == "objective") {
      vs >> fit.objective;
    } else if (key == "mu" || key == "nu") {
      std::size_t c;
      auto& dst = key == "mu" ? mu : nu;
      while (vs >> c) dst.push_back(c);
    } else if (key == "theta") {
      double t;
      while (vs >> t) theta.push_back(t);
    } else if (key == "S") {
      s_line = rest;
    } else if (key == "T") {
      t_line = rest;
    } else {
      throw std::runtime_error("fit record: unknown key '" + key + "'");
    }
  }
  if (k == 0 || theta.size() != k * k) throw std::runtime_error("fit record: missing or malformed K/theta");
  RealMatrix th(k, k);
  for (std::size_t x = 0; x < theta.size(); ++x) th.data()[x] = theta[x];
  fit.phi_hat = CoBlockParams(ClassCounts(mu), ClassCounts(nu), th);
  fit.s = parse_labeling_line(s_line, k);
  fit.t = parse_labeling_line(t_line, k);
  return fit;
}

}  // namespace coclust
