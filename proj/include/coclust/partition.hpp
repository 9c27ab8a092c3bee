#pragma once

// Two-class interval partitions of [0, 1] and fast block-mass evaluation of
// omega over families of partition pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "coclust/detail/matrix.hpp"
#include "coclust/kernels.hpp"

namespace coclust {

struct Interval {
  double lo;
  double hi;
  double length() const noexcept { return hi - lo; }
};

enum class PartitionKind {
  kCanonicalLower,  // class 0 = [0, mu_0)
  kCanonicalUpper,  // class 0 = [1 - mu_0, 1]
  kWindow,          // one class occupies a single window [start, start + width)
};

/// Which class occupies the window of a kWindow partition.
enum class WindowOrientation { kFirstClass, kSecondClass };

/// Two-class measurable partition of [0, 1] made of finitely many intervals.
/// Class 0 has measure mu_0; class 1 is the complement.
class IntervalPartition {
 public:
  static IntervalPartition canonical_lower(double mu0) {
    check(mu0);
    return IntervalPartition(PartitionKind::kCanonicalLower, mu0, 0.0, WindowOrientation::kFirstClass,
                             {{0.0, mu0}}, {{mu0, 1.0}});
  }

  static IntervalPartition canonical_upper(double mu0) {
    check(mu0);
    return IntervalPartition(PartitionKind::kCanonicalUpper, mu0, 1.0 - mu0, WindowOrientation::kFirstClass,
                             {{1.0 - mu0, 1.0}}, {{0.0, 1.0 - mu0}});
  }

  /// The oriented class occupies [start, start + its measure).
  static IntervalPartition window(double mu0, double start, WindowOrientation orientation) {
    check(mu0);
    const double width = orientation == WindowOrientation::kFirstClass ? mu0 : 1.0 - mu0;
    if (!(start >= 0.0 && start + width <= 1.0 + 1e-15))
      throw std::invalid_argument("IntervalPartition::window: window leaves [0, 1]");
    const double end = std::min(1.0, start + width);
    std::vector<Interval> inside{{start, end}};
    std::vector<Interval> outside;
    if (start > 0.0) outside.push_back({0.0, start});
    if (end < 1.0) outside.push_back({end, 1.0});
    if (orientation == WindowOrientation::kFirstClass)
      return IntervalPartition(PartitionKind::kWindow, mu0, start, orientation, std::move(inside),
                               std::move(outside));
    return IntervalPartition(PartitionKind::kWindow, mu0, start, orientation, std::move(outside),
                             std::move(inside));
  }

  PartitionKind kind() const noexcept { return kind_; }
  double mu0() const noexcept { return mu0_; }
  double start() const noexcept { return start_; }
  WindowOrientation orientation() const noexcept { return orientation_; }

  const std::vector<Interval>& intervals(std::size_t cls) const noexcept { return classes_[cls]; }

  double measure(std::size_t cls) const noexcept {
    double total = 0.0;
    for (const auto& iv : classes_[cls]) total += iv.length();
    return total;
  }

  int classify(double x) const noexcept {
    for (const auto& iv : classes_[0])
      if (x >= iv.lo && (x < iv.hi || (iv.hi >= 1.0 && x <= 1.0))) return 0;
    return 1;
  }

  std::string describe() const {
    switch (kind_) {
      case PartitionKind::kCanonicalLower: return "lower(" + std::to_string(mu0_) + ")";
      case PartitionKind::kCanonicalUpper: return "upper(" + std::to_string(mu0_) + ")";
      case PartitionKind::kWindow:
        return std::string(orientation_ == WindowOrientation::kFirstClass ? "window1(" : "window2(") +
               std::to_string(mu0_) + "@" + std::to_string(start_) + ")";
    }
    return "?";
  }

 private:
  IntervalPartition(PartitionKind kind, double mu0, double start, WindowOrientation orientation,
                    std::vector<Interval> first, std::vector<Interval> second)
      : kind_(kind), mu0_(mu0), start_(start), orientation_(orientation), classes_{std::move(first), std::move(second)} {
    for (auto& cls : classes_)
      std::erase_if(cls, [](const Interval& iv) { return !(iv.hi > iv.lo); });
  }

  static void check(double mu0) {
    if (!(mu0 >= 0.0 && mu0 <= 1.0)) throw std::invalid_argument("IntervalPartition: mu0 must lie in [0, 1]");
  }

  PartitionKind kind_;
  double mu0_;
  double start_;
  WindowOrientation orientation_;
  std::array<std::vector<Interval>, 2> classes_;
};

/// The two canonical partitions for class-0 measure mu0.
inline std::vector<IntervalPartition> canonical_family(double mu0) {
  return {IntervalPartition::canonical_lower(mu0), IntervalPartition::canonical_upper(mu0)};
}

/// Canonical partitions plus `grid` equally spaced window starts for each
/// orientation (2 * grid + 2 partitions). Both canonical partitions recur
/// as window endpoints.
inline std::vector<IntervalPartition> threshold_family(double mu0, std::size_t grid) {
  if (grid < 2) throw std::invalid_argument("threshold_family: grid must be >= 2");
  auto family = canonical_family(mu0);
  family.reserve(2 * grid + 2);
  for (auto orientation : {WindowOrientation::kFirstClass, WindowOrientation::kSecondClass}) {
    const double width = orientation == WindowOrientation::kFirstClass ? mu0 : 1.0 - mu0;
    const double span = 1.0 - width;
    for (std::size_t k = 0; k < grid; ++k) {
      const double start = k + 1 == grid ? span : span * static_cast<double>(k) / static_cast<double>(grid - 1);
      family.push_back(IntervalPartition::window(mu0, start, orientation));
    }
  }
  return family;
}

/// 2 x 2 block masses of omega for every (row partition, column partition)
/// pair of two families.
///
/// Exact separable kernels use rho [(int_I f)(int_J f) + |I||J|/2] with one
/// quadrature per interval. Block and grid kernels are summed exactly.
/// Clamped separable kernels use a cumulative table over the merged
/// breakpoints with 5 x 5 Gauss-Legendre nodes per cell, which is an
/// approximation along the clamping curve.
class PartitionMassOracle {
 public:
  PartitionMassOracle(const Kernel& kernel, std::vector<IntervalPartition> rows, std::vector<IntervalPartition> cols)
      : kernel_(kernel), rows_(std::move(rows)), cols_(std::move(cols)) {
    if (const auto* s = kernel_.sigmoid()) {
      if (s->valid_unclamped()) {
        mode_ = Mode::kSeparable;
        rho_ = s->rho();
        row_profiles_ = profiles(*s, rows_);
        col_profiles_ = profiles(*s, cols_);
      } else {
        mode_ = Mode::kTable;
        build_table();
      }
    } else {
      mode_ = Mode::kDirect;
    }
  }

  const std::vector<IntervalPartition>& rows() const noexcept { return rows_; }
  const std::vector<IntervalPartition>& cols() const noexcept { return cols_; }
  bool exact() const noexcept { return mode_ != Mode::kTable; }

  /// mass(a, b) = int over sigma^{-1}(a) x tau^{-1}(b) of omega.
  std::array<double, 4> mass(std::size_t r, std::size_t c) const {
    std::array<double, 4> out{};
    switch (mode_) {
      case Mode::kSeparable: {
        const auto& rp = row_profiles_[r];
        const auto& cp = col_profiles_[c];
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b)
            out[2 * a + b] = rho_ * (rp.f[a] * cp.f[b] + 0.5 * rp.len[a] * cp.len[b]);
        break;
      }
      case Mode::kDirect:
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b) {
            double total = 0.0;
            for (const auto& ix : rows_[r].intervals(a))
              for (const auto& iy : cols_[c].intervals(b)) total += kernel_.rectangle_mass(ix.lo, ix.hi, iy.lo, iy.hi);
            out[2 * a + b] = total;
          }
        break;
      case Mode::kTable:
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b) {
            double total = 0.0;
            for (const auto& ix : rows_[r].intervals(a))
              for (const auto& iy : cols_[c].intervals(b)) total += table_rect(ix, iy);
            out[2 * a + b] = total;
          }
        break;
    }
    return out;
  }

  RealMatrix mass_matrix(std::size_t r, std::size_t c) const {
    const auto m = mass(r, c);
    return RealMatrix{{m[0], m[1]}, {m[2], m[3]}};
  }

 private:
  enum class Mode { kSeparable, kDirect, kTable };

  struct Profile {
    std::array<double, 2> f{};
    std::array<double, 2> len{};
  };

  static std::vector<Profile> profiles(const SigmoidSeparableKernel& s, const std::vector<IntervalPartition>& family) {
    std::vector<Profile> out(family.size());
    for (std::size_t p = 0; p < family.size(); ++p)
      for (std::size_t a = 0; a < 2; ++a)
        for (const auto& iv : family[p].intervals(a)) {
          out[p].f[a] += s.f_integral(iv.lo, iv.hi);
          out[p].len[a] += iv.length();
        }
    return out;
  }

  static std::vector<double> merged_breaks(const std::vector<IntervalPartition>& family, std::vector<double> extra) {
    std::vector<double> b = std::move(extra);
    b.push_back(0.0);
    b.push_back(1.0);
    for (const auto& p : family)
      for (std::size_t a = 0; a < 2; ++a)
        for (const auto& iv : p.intervals(a)) {
          b.push_back(iv.lo);
          b.push_back(iv.hi);
        }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

  void build_table() {
    xb_ = merged_breaks(rows_, kernel_.row_breaks());
    yb_ = merged_breaks(cols_, kernel_.col_breaks());
    static constexpr std::array<double, 5> kNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                  0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> kWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                    0.4786286704993665, 0.2369268850561891};
    auto nodes_for = [](const std::vector<double>& breaks, std::vector<double>& pts, std::vector<double>& wts) {
      for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
        const double half = 0.5 * (breaks[c + 1] - breaks[c]);
        const double mid = 0.5 * (breaks[c + 1] + breaks[c]);
        for (std::size_t k = 0; k < 5; ++k) {
          pts.push_back(mid + half * kNodes[k]);
          wts.push_back(half * kWeights[k]);
        }
      }
    };
    std::vector<double> xp, xw, yp, yw;
    nodes_for(xb_, xp, xw);
    nodes_for(yb_, yp, yw);
    const std::size_t nx = xb_.size() - 1;
    const std::size_t ny = yb_.size() - 1;
    cumulative_ = RealMatrix(nx + 1, ny + 1, 0.0);
    std::vector<double> cell_row(ny);
    for (std::size_t cx = 0; cx < nx; ++cx) {
      const auto block = kernel_.tabulate(std::span<const double>(xp).subspan(5 * cx, 5), yp);
      std::fill(cell_row.begin(), cell_row.end(), 0.0);
      for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t cy = 0; cy < ny; ++cy) {
          double acc = 0.0;
          for (std::size_t l = 0; l < 5; ++l) acc += yw[5 * cy + l] * block(k, 5 * cy + l);
          cell_row[cy] += xw[5 * cx + k] * acc;
        }
      double running = 0.0;
      for (std::size_t cy = 0; cy < ny; ++cy) {
        running += cell_row[cy];
        cumulative_(cx + 1, cy + 1) = cumulative_(cx, cy + 1) + running;
      }
    }
  }

  static std::size_t index_of(const std::vector<double>& breaks, double v) {
    const auto it = std::lower_bound(breaks.begin(), breaks.end(), v);
    return static_cast<std::size_t>(it - breaks.begin());
  }

  double table_rect(const Interval& ix, const Interval& iy) const {
    const std::size_t x0 = index_of(xb_, ix.lo), x1 = index_of(xb_, ix.hi);
    const std::size_t y0 = index_of(yb_, iy.lo), y1 = index_of(yb_, iy.hi);
    return cumulative_(x1, y1) - cumulative_(x0, y1) - cumulative_(x1, y0) + cumulative_(x0, y0);
  }

  Kernel kernel_;
  std::vector<IntervalPartition> rows_;
  std::vector<IntervalPartition> cols_;
  Mode mode_ = Mode::kDirect;
  double rho_ = 0.0;
  std::vector<Profile> row_profiles_;
  std::vector<Profile> col_profiles_;
  std::vector<double> xb_;
  std::vector<double> yb_;
  RealMatrix cumulative_;
};

}  // namespace coclust
