#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <vector>

#include "coclust/detail/parallel.hpp"
#include "coclust/detail/rng.hpp"

using namespace coclust;

TEST(CounterStream, SameKeySameSequence) {
  CounterStream a(42, StreamRole::kBernoulli), b(42, StreamRole::kBernoulli);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(CounterStream, RolesAreDisjoint) {
  CounterStream a(42, StreamRole::kRowLatent), b(42, StreamRole::kColLatent);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(a.next());
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(seen.count(b.next()), 0u);
}

TEST(CounterStream, UniformMoments) {
  CounterStream s(7, StreamRole::kReplicate);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12, 2e-3);
}

TEST(CounterStream, BelowStaysInRangeAndCoversIt) {
  CounterStream s(3, StreamRole::kInit);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) ++hist[s.below(7)];
  for (int h : hist) EXPECT_GT(h, 800);
  EXPECT_EQ(s.below(1), 0u);
}

TEST(CounterStream, ShuffleIsPermutation) {
  CounterStream s(5, StreamRole::kInit);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  s.shuffle(std::span<int>(w));
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

TEST(DeriveKey, PathSensitive) {
  EXPECT_NE(derive_key(1, {2, 3}), derive_key(1, {3, 2}));
  EXPECT_NE(derive_key(1, {2}), derive_key(2, {2}));
  EXPECT_EQ(derive_key(9, {1, 2, 3}), derive_key(9, {1, 2, 3}));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST(ParallelFor, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(100, [](std::size_t i) { if (i == 37) throw std::runtime_error("boom"); }, 3),
               std::runtime_error);
}

TEST(WorkerCount, HonoursEnvironmentCap) {
  ::setenv("COCLUST_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1u);
  ::unsetenv("COCLUST_THREADS");
  EXPECT_GE(worker_count(), 1u);
}
