#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>

#include "coclust/detail/error.hpp"

namespace coclust::quad {

// Globally adaptive Gauss-Kronrod (7/15): repeatedly bisect the panel with
// the largest error estimate until the summed estimate meets an absolute
// tolerance. Boost's own recursion terminates on a tolerance relative to the
// integral, which never triggers for (near) zero-mean integrands.
inline constexpr std::size_t kMaxPanels = 4000;

/// Integrates f over [a, b]; throws NumericError when the error estimate
/// exceeds abs_tol (or a round-off floor relative to the L1 norm).
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10, const char* what = "integrate") {
  if (a == b) return 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Panel {
    double lo, hi, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0, 0.0};
    p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    return p;
  };
  std::priority_queue<Panel> panels;
  panels.push(eval(a, b));
  double value = panels.top().value, error = panels.top().error, l1 = panels.top().l1;
  auto done = [&] { return error <= abs_tol || error <= 64.0 * std::numeric_limits<double>::epsilon() * l1; };
  while (!done() && panels.size() < kMaxPanels) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      panels.push({worst.lo, worst.hi, worst.value, 0.0, worst.l1});
      error -= worst.error;
      continue;
    }
    const Panel left = eval(worst.lo, mid), right = eval(mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed the drift of incremental updates.
  value = 0.0;
  error = 0.0;
  for (; !panels.empty(); panels.pop()) {
    value += panels.top().value;
    error += panels.top().error;
  }
  if (!std::isfinite(value) || !done())
    throw NumericError(std::string(what) + ": quadrature did not reach tolerance on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]",
                       value, error);
  return value;
}

/// Iterated 1-D adaptive integration of f(x, y) over a rectangle.
template <typename F>
double integrate2d(F&& f, double x0, double x1, double y0, double y1, double abs_tol = 1e-8) {
  if (x0 == x1 || y0 == y1) return 0.0;
  const double inner_tol = abs_tol / (4.0 * std::abs(x1 - x0));
  auto row = [&](double x) {
    return integrate([&](double y) { return f(x, y); }, y0, y1, inner_tol, "integrate2d inner");
  };
  return integrate(row, x0, x1, abs_tol, "integrate2d outer");
}

/// Sums integrate2d over the tensor panels defined by sorted breakpoints.
/// Panels should not straddle discontinuities of f.
template <typename F>
double integrate2d_panels(F&& f, std::span<const double> xs, std::span<const double> ys,
                          double abs_tol = 1e-8) {
  double total = 0.0;
  const double panels = static_cast<double>((xs.size() - 1) * (ys.size() - 1));
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t j = 0; j + 1 < ys.size(); ++j)
      total += integrate2d(f, xs[i], xs[i + 1], ys[j], ys[j + 1], abs_tol / panels);
  return total;
}

}  // namespace coclust::quad
