#pragma once

// Group-wise median and interquartile range of sweep (or rate) CSV output.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coclust/io.hpp"

namespace coclust::harness {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("csv schema: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
  bool has(const std::string& name) const { return std::find(header.begin(), header.end(), name) != header.end(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

/// Numeric fields compare numerically, everything else lexicographically.
struct KeyLess {
  bool operator()(const std::vector<std::string>& a, const std::vector<std::string>& b) const {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      double x, y;
      if (parse_number(a[i], x) && parse_number(b[i], y)) {
        if (x != y) return x < y;
      } else if (a[i] != b[i]) {
        return a[i] < b[i];
      }
    }
    return a.size() < b.size();
  }
};

/// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv schema: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = detail::split_csv_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != t.header.size())
      throw std::invalid_argument("csv schema: line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, header has " +
                                  std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

struct MetricSummary {
  std::string metric;
  std::size_t count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct SummaryRow {
  std::vector<std::string> key;
  std::vector<MetricSummary> metrics;
};

struct Summary {
  std::vector<std::string> keys;
  std::vector<std::string> metrics;
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
};

/// Metrics summarised for a table: sup_gap for rate output, otherwise
/// excess_risk_rel and kl_normalized.
inline std::vector<std::string> summary_metrics(const CsvTable& t) {
  if (t.has("sup_gap")) return {"sup_gap"};
  return {"excess_risk_rel", "kl_normalized"};
}

/// Groups rows by `keys` and reports median and quartiles per metric.
/// Values are sorted before aggregation, so row order never matters.
/// Non-finite values are skipped; a group left with no values is omitted
/// and a warning recorded.
inline Summary summarize(const CsvTable& table, const std::vector<std::string>& keys) {
  Summary out;
  out.keys = keys;
  out.metrics = summary_metrics(table);
  std::vector<std::size_t> key_cols, metric_cols;
  for (const auto& k : keys) key_cols.push_back(table.column(k));
  for (const auto& m : out.metrics) metric_cols.push_back(table.column(m));

  std::map<std::vector<std::string>, std::vector<std::vector<double>>, detail::KeyLess> groups;
  for (const auto& row : table.rows) {
    std::vector<std::string> key;
    for (auto c : key_cols) key.push_back(row[c]);
    auto& values = groups[key];
    values.resize(metric_cols.size());
    for (std::size_t i = 0; i < metric_cols.size(); ++i) {
      double v;
      if (!detail::parse_number(row[metric_cols[i]], v))
        throw std::invalid_argument("csv schema: column '" + out.metrics[i] + "' holds non-numeric value '" +
                                    row[metric_cols[i]] + "'");
      if (std::isfinite(v)) values[i].push_back(v);
    }
  }
  for (auto& [key, values] : groups) {
    const bool empty = std::all_of(values.begin(), values.end(), [](const auto& v) { return v.empty(); });
    if (empty) {
      std::string name;
      for (std::size_t i = 0; i < key.size(); ++i) name += (i ? "," : "") + keys[i] + "=" + key[i];
      out.warnings.push_back("group {" + name + "} has no finite values; omitted");
      continue;
    }
    SummaryRow sr;
    sr.key = key;
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto& v = values[i];
      std::sort(v.begin(), v.end());
      MetricSummary ms;
      ms.metric = out.metrics[i];
      ms.count = v.size();
      if (!v.empty()) {
        ms.median = detail::quantile_sorted(v, 0.5);
        ms.q1 = detail::quantile_sorted(v, 0.25);
        ms.q3 = detail::quantile_sorted(v, 0.75);
      } else {
        ms.median = ms.q1 = ms.q3 = std::nan("");
      }
      sr.metrics.push_back(ms);
    }
    out.rows.push_back(std::move(sr));
  }
  return out;
}

inline void write_summary_csv(std::ostream& out, const Summary& s) {
  for (const auto& k : s.keys) out << k << ',';
  out << "count";
  for (const auto& m : s.metrics) out << ',' << m << "_median," << m << "_q1," << m << "_q3," << m << "_iqr";
  out << '\n';
  for (const auto& r : s.rows) {
    for (const auto& k : r.key) out << k << ',';
    out << (r.metrics.empty() ? 0 : r.metrics.front().count);
    for (const auto& m : r.metrics)
      out << ',' << format_double(m.median) << ',' << format_double(m.q1) << ',' << format_double(m.q3) << ','
          << format_double(m.q3 - m.q1);
    out << '\n';
  }
}

}  // namespace coclust::harness
