#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "coclust/fit.hpp"
#include "oracles.hpp"

using namespace coclust;

TEST(BlockMeans, Examples) {
  const BinaryMatrix a{{1, 1, 0}, {1, 0, 0}, {0, 0, 1}};
  const Labeling s({0, 0, 1}, 2), t({0, 0, 1}, 2);
  const auto th = block_means(a, s, t);
  EXPECT_DOUBLE_EQ(th(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(th(0, 1), kDefaultEps);
  EXPECT_DOUBLE_EQ(th(1, 0), kDefaultEps);
  EXPECT_DOUBLE_EQ(th(1, 1), 1.0 - kDefaultEps);
  // Empty class -> 1/2.
  const auto empty = block_means(a, Labeling({0, 0, 0}, 2), t);
  EXPECT_EQ(empty(1, 0), 0.5);
  EXPECT_EQ(empty(1, 1), 0.5);
}

TEST(InitLabels, OracleLatentSplitsAtHalf) {
  LatentSample lat{{0.1, 0.7}, {0.9, 0.2}, 0};
  InitContext ctx;
  ctx.m = 2;
  ctx.n = 2;
  ctx.latents = &lat;
  const auto [s, t] = init_labels(InitStrategy::kOracleLatent, ctx);
  EXPECT_EQ(s.labels(), (std::vector<int>{0, 1}));
  EXPECT_EQ(t.labels(), (std::vector<int>{1, 0}));
  ctx.latents = nullptr;
  EXPECT_THROW(init_labels(InitStrategy::kOracleLatent, ctx), std::invalid_argument);
  EXPECT_THROW(init_labels(InitStrategy::kProvided, ctx), std::invalid_argument);
}

TEST(InitLabels, RandomIsDeterministic) {
  InitContext ctx;
  ctx.m = 50;
  ctx.n = 40;
  ctx.k = 3;
  ctx.seed = 9;
  const auto a = init_labels(InitStrategy::kRandom, ctx), b = init_labels(InitStrategy::kRandom, ctx);
  EXPECT_EQ(a, b);
  ctx.restart = 1;
  EXPECT_NE(init_labels(InitStrategy::kRandom, ctx).first, a.first);
}

TEST(Fit, AllZeroArray) {
  const BinaryMatrix a(8, 6, 0);
  FitConfig cfg;
  cfg.restarts = 2;
  const auto pl = fit_coblockmodel(a, 2, ObjectiveKind::kProfileLikelihood, cfg);
  EXPECT_NEAR(pl.objective, std::log1p(-kDefaultEps), 1e-15);
  for (std::size_t x = 0; x < 4; ++x) {
    const auto sz = pl.phi_hat.mu.counts()[x / 2] * pl.phi_hat.nu.counts()[x % 2];
    EXPECT_EQ(pl.phi_hat.theta.data()[x], sz > 0 ? kDefaultEps : 0.5);
  }
  EXPECT_NEAR(fit_coblockmodel(a, 2, ObjectiveKind::kLeastSquares, cfg).objective, 0.0, 1e-10);
}

TEST(Fit, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(11);
  FitConfig cfg;
  cfg.restarts = 64;
  for (int trial = 0; trial < 6; ++trial) {
    const auto a = oracle::random_binary(6, 6, 0.4, rng);
    cfg.seed = static_cast<std::uint64_t>(trial);
    for (bool pl : {true, false}) {
      const auto kind = pl ? ObjectiveKind::kProfileLikelihood : ObjectiveKind::kLeastSquares;
      const auto fit = fit_coblockmodel(a, 2, kind, cfg);
      EXPECT_NEAR(fit.objective, oracle::brute_profile(a, 2, pl), 1e-12) << trial << " pl=" << pl;
      EXPECT_NEAR(objective_at(a, fit.phi_hat.theta, fit.s, fit.t, kind), fit.objective, 1e-15);
    }
  }
}

TEST(Fit, SingleClassIsGlobalMean) {
  std::mt19937_64 rng(12);
  const auto a = oracle::random_binary(7, 5, 0.3, rng);
  const auto fit = fit_coblockmodel(a, 1, ObjectiveKind::kProfileLikelihood, {});
  EXPECT_NEAR(fit.objective, oracle::brute_profile(a, 1, true), 1e-14);
}

TEST(Fit, DeterministicAndTraced) {
  const auto arr = sample_bipartite(make_sigmoid_kernel(5.0, 0.5), 40, 40, 3);
  FitConfig cfg;
  cfg.restarts = 3;
  cfg.seed = 4;
  const auto x = fit_coblockmodel(arr.a, 2, ObjectiveKind::kProfileLikelihood, cfg);
  const auto y = fit_coblockmodel(arr.a, 2, ObjectiveKind::kProfileLikelihood, cfg);
  EXPECT_EQ(x.s, y.s);
  EXPECT_EQ(x.t, y.t);
  EXPECT_EQ(x.objective, y.objective);
  ASSERT_EQ(x.trace.size(), 3u);
  for (const auto& tr : x.trace) {
    EXPECT_GE(tr.after_anneal, tr.initial - 1e-12);
    double prev = tr.after_anneal;
    for (double p : tr.polish) {
      EXPECT_GT(p, prev);
      prev = p;
    }
    EXPECT_LE(tr.final_value, x.objective);
  }
}

TEST(Fit, RecoversPlantedBlocks) {
  const CoBlockParams planted(ClassCounts({1, 1}), ClassCounts({1, 1}), RealMatrix{{0.8, 0.2}, {0.2, 0.8}});
  const auto arr = sample_bipartite(BlockKernel(planted), 60, 60, 21);
  FitConfig cfg;
  cfg.restarts = 4;
  const auto fit = fit_coblockmodel(arr.a, 2, ObjectiveKind::kProfileLikelihood, cfg);
  auto truth = [](const std::vector<double>& v) {
    std::vector<int> l;
    for (double x : v) l.push_back(x < 0.5 ? 0 : 1);
    return Labeling(l, 2);
  };
  EXPECT_EQ(label_accuracy(fit.s, truth(arr.latents.xi)), 1.0);
  EXPECT_EQ(label_accuracy(fit.t, truth(arr.latents.zeta)), 1.0);
}

TEST(Fit, OracleLatentStartNeedsLatents) {
  FitConfig cfg;
  cfg.init = InitStrategy::kOracleLatent;
  EXPECT_THROW(fit_coblockmodel(BinaryMatrix(4, 4, 0), 2, ObjectiveKind::kProfileLikelihood, cfg),
               std::invalid_argument);
}

TEST(LabelAccuracy, PermutationInvariant) {
  const Labeling a({0, 0, 1, 1}, 2), b({1, 1, 0, 0}, 2), c({1, 0, 0, 0}, 2);
  EXPECT_EQ(label_accuracy(a, b), 1.0);
  EXPECT_EQ(label_accuracy(a, c), 0.75);
  EXPECT_THROW(label_accuracy(a, Labeling({0, 1, 2, 0}, 3)), UnsupportedError);
}

TEST(FitConfig, Validation) {
  FitConfig c;
  EXPECT_NO_THROW(c.validate());
  c.restarts = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.cooling_rate = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.single_relabel = c.pair_swap = false;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.eps = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(parse_init_strategy("greedy"), std::invalid_argument);
}
