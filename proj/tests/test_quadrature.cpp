#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "coclust/detail/quadrature.hpp"

using namespace coclust;

TEST(Quadrature, Polynomial) {
  EXPECT_NEAR(quad::integrate([](double x) { return x * x * x; }, 0.0, 2.0), 4.0, 1e-13);
}

TEST(Quadrature, ZeroMeanIntegrandTerminates) {
  // Boost's relative criterion never triggers here; ours must.
  const double v = quad::integrate([](double x) { return std::tanh(5 * (x - 0.5)); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Quadrature, EndpointSingularDerivative) {
  EXPECT_NEAR(quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-11), 2.0 / 3.0, 1e-11);
}

TEST(Quadrature, ReversedBounds) {
  EXPECT_NEAR(quad::integrate([](double x) { return std::exp(x); }, 1.0, 0.0), -(std::numbers::e - 1.0), 1e-12);
}

TEST(Quadrature, UnreachableToleranceThrows) {
  // A discontinuous integrand with an absurd tolerance cannot converge.
  auto step = [](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; };
  EXPECT_THROW(quad::integrate(step, 0.0, 1.0, 1e-300), NumericError);
}

TEST(Quadrature, TwoDimensional) {
  const double v = quad::integrate2d([](double x, double y) { return x * y + std::sin(x + y); }, 0, 1, 0, 2, 1e-10);
  const double exact = 0.5 * 2.0 + std::sin(1.0) + std::sin(2.0) - std::sin(3.0);
  EXPECT_NEAR(v, exact, 1e-9);
}

TEST(Quadrature, Panels) {
  const double xs[] = {0.0, 0.5, 1.0};
  auto f = [](double x, double y) { return (x < 0.5 ? 1.0 : 3.0) * y; };
  EXPECT_NEAR(quad::integrate2d_panels(f, std::span<const double>(xs), std::span<const double>(xs)), 1.0, 1e-12);
}
