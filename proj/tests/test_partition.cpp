#include <gtest/gtest.h>

#include "coclust/partition.hpp"
#include "oracles.hpp"

using namespace coclust;

TEST(IntervalPartition, CanonicalMeasures) {
  const auto lo = IntervalPartition::canonical_lower(0.3), up = IntervalPartition::canonical_upper(0.3);
  EXPECT_DOUBLE_EQ(lo.measure(0), 0.3);
  EXPECT_DOUBLE_EQ(up.measure(0), 0.3);
  EXPECT_NEAR(up.measure(1), 0.7, 1e-15);
  EXPECT_EQ(lo.classify(0.1), 0);
  EXPECT_EQ(lo.classify(0.5), 1);
  EXPECT_EQ(up.classify(0.1), 1);
  EXPECT_EQ(up.classify(1.0), 0);
}

TEST(IntervalPartition, Windows) {
  const auto w = IntervalPartition::window(0.25, 0.5, WindowOrientation::kFirstClass);
  EXPECT_EQ(w.intervals(0).size(), 1u);
  EXPECT_EQ(w.intervals(1).size(), 2u);
  EXPECT_DOUBLE_EQ(w.measure(0), 0.25);
  const auto v = IntervalPartition::window(0.25, 0.1, WindowOrientation::kSecondClass);
  EXPECT_NEAR(v.measure(0), 0.25, 1e-15);
  EXPECT_NEAR(v.measure(1), 0.75, 1e-15);
  EXPECT_THROW(IntervalPartition::window(0.5, 0.6, WindowOrientation::kFirstClass), std::invalid_argument);
}

TEST(IntervalPartition, ThresholdFamilySize) {
  const auto fam = threshold_family(0.4, 16);
  EXPECT_EQ(fam.size(), 34u);
  for (const auto& p : fam) EXPECT_NEAR(p.measure(0), 0.4, 1e-12);
}

TEST(PartitionMassOracle, SeparableMatchesOracle) {
  const Kernel k = make_sigmoid_kernel(3.0, 0.5);
  const oracle::Separable s(3.0, 0.5);
  const auto fam = threshold_family(0.35, 8);
  const PartitionMassOracle m(k, fam, fam);
  EXPECT_TRUE(m.exact());
  for (std::size_t r = 0; r < fam.size(); r += 3)
    for (std::size_t c = 0; c < fam.size(); c += 5) {
      const auto mass = m.mass(r, c);
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          double fr = 0, lr = 0, fc = 0, lc = 0;
          for (auto iv : fam[r].intervals(a)) fr += s.F(iv.lo, iv.hi), lr += iv.length();
          for (auto iv : fam[c].intervals(b)) fc += s.F(iv.lo, iv.hi), lc += iv.length();
          EXPECT_NEAR(mass[2 * a + b], 0.5 * (fr * fc + 0.5 * lr * lc), 1e-12);
        }
    }
}

TEST(PartitionMassOracle, ClampedTableIsClose) {
  // beta = 1, rho = 1 is clamped; the table is an approximation.
  const Kernel k = make_sigmoid_kernel(1.0, 1.0);
  const auto fam = canonical_family(0.5);
  const PartitionMassOracle m(k, fam, fam);
  EXPECT_FALSE(m.exact());
  const auto mass = m.mass(0, 0);
  // Block [0,1/2)^2: integrand clamp((2x-1)(2y-1) + 1/2) = min(1, ...).
  const double ref = oracle::simpson(
      [](double x) {
        return oracle::simpson([x](double y) { return std::min(1.0, (2 * x - 1) * (2 * y - 1) + 0.5); }, 0.0, 0.5,
                               2000);
      },
      0.0, 0.5, 2000);
  EXPECT_NEAR(mass[0], ref, 1e-4);
  double total = 0;
  for (double v : mass) total += v;
  EXPECT_NEAR(total, k.total_mass(), 1e-4);
}

TEST(PartitionMassOracle, BlockKernelAligned) {
  const CoBlockParams phi(ClassCounts({2, 3}), ClassCounts({1, 1}), RealMatrix{{0.1, 0.6}, {0.8, 0.3}});
  const Kernel k = BlockKernel(phi);
  const PartitionMassOracle m(k, {IntervalPartition::canonical_lower(0.4)}, {IntervalPartition::canonical_lower(0.5)});
  const auto mass = m.mass(0, 0);
  EXPECT_NEAR(mass[0], 0.4 * 0.5 * 0.1, 1e-15);
  EXPECT_NEAR(mass[1], 0.4 * 0.5 * 0.6, 1e-15);
  EXPECT_NEAR(mass[2], 0.6 * 0.5 * 0.8, 1e-15);
  EXPECT_NEAR(mass[3], 0.6 * 0.5 * 0.3, 1e-15);
}
