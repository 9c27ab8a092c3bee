#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coclust/harness/config.hpp"
#include "coclust/harness/rate.hpp"
#include "coclust/harness/summarize.hpp"
#include "coclust/harness/sweep.hpp"

using namespace coclust;
using namespace coclust::harness;

namespace {
ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

CsvTable table(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}
}  // namespace

TEST(Config, ParsesKeys) {
  const auto c = parse(
      "# comment\n"
      "betas = 3, 5\n"
      "rho_modes = dense, poly\n"
      "n_grid = 50 100\n"
      "aspect = 0.5\n"
      "reps = 4   # trailing\n"
      "kinds = pl, ls\n"
      "restarts = 2\n"
      "init = random\n");
  EXPECT_EQ(c.betas, (std::vector<double>{3, 5}));
  EXPECT_EQ(c.rho_modes, (std::vector<RhoMode>{RhoMode::kDense, RhoMode::kPoly}));
  EXPECT_EQ(c.n_grid, (std::vector<std::size_t>{50, 100}));
  EXPECT_EQ(c.m_for(100), 50u);
  EXPECT_EQ(c.reps, 4u);
  EXPECT_EQ(c.kinds.size(), 2u);
  EXPECT_EQ(c.fit.restarts, 2u);
  EXPECT_EQ(c.fit.init, InitStrategy::kRandom);
  EXPECT_EQ(parse("").fit.init, InitStrategy::kOracleLatent);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse("betaz = 3\n"), std::invalid_argument);
  EXPECT_THROW(parse("betas 3\n"), std::invalid_argument);
  EXPECT_THROW(parse("reps = -1\n"), std::invalid_argument);
  EXPECT_THROW(parse("betas = 0.5\n"), std::invalid_argument);
  EXPECT_THROW(parse("init = provided\n"), std::invalid_argument);
  EXPECT_THROW(parse("kinds = ml\n"), std::invalid_argument);
  try {
    parse("reps = 2\nfoo = 1\n");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
  }
}

TEST(Sweep, OneCellRowsAndDeterminism) {
  auto c = parse("betas = 3\nn_grid = 40\nreps = 5\nrestarts = 2\nfidelity_grid = 32\n");
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 5u);
  std::ostringstream a, b;
  write_sweep_csv(a, rows);
  write_sweep_csv(b, run_sweep(c));
  const std::string text = a.str();
  EXPECT_EQ(text, b.str());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_EQ(text.substr(0, text.find('\n')), kSweepHeader);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    EXPECT_EQ(rows[r].rep, r);
    EXPECT_EQ(rows[r].runtime_ms, 0.0);
    EXPECT_GE(rows[r].excess_risk_rel, -1e-9);
    EXPECT_GE(rows[r].fidelity, 0.0);
  }
  const auto cell = build_cell(c, 3.0, RhoMode::kDense, 40);
  for (const auto& r : rows) EXPECT_GE(r.kl_normalized, cell.kl_star - 1e-9);
  EXPECT_NE(rows[0].seed, rows[1].seed);
}

TEST(Sweep, KindsShareTheSample) {
  auto c = parse("betas = 5\nn_grid = 30\nreps = 2\nkinds = pl, ls\nrestarts = 1\nfidelity_grid = 16\n");
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].seed, rows[1].seed);
  EXPECT_NE(rows[0].kind, rows[1].kind);
}

TEST(Sweep, ReplicateSeedDependsOnEveryCoordinate) {
  const auto base = replicate_seed(1, 3.0, RhoMode::kDense, 100, 0);
  EXPECT_EQ(base, replicate_seed(1, 3.0, RhoMode::kDense, 100, 0));
  EXPECT_NE(base, replicate_seed(2, 3.0, RhoMode::kDense, 100, 0));
  EXPECT_NE(base, replicate_seed(1, 5.0, RhoMode::kDense, 100, 0));
  EXPECT_NE(base, replicate_seed(1, 3.0, RhoMode::kPoly, 100, 0));
  EXPECT_NE(base, replicate_seed(1, 3.0, RhoMode::kDense, 200, 0));
  EXPECT_NE(base, replicate_seed(1, 3.0, RhoMode::kDense, 100, 1));
}

TEST(Rate, ConstantKernelOnesDirection) {
  const auto s = sample_bipartite(GridKernel::constant(0.3), 20, 30, 5);
  double mean = 0;
  for (auto v : s.a.data()) mean += v;
  mean /= 600.0;
  const auto gap = sup_support_gap(s.a, GridKernel::constant(0.3), ClassCounts({10, 10}), ClassCounts({15, 15}),
                                   {Direction::ones(2)}, {});
  EXPECT_NEAR(gap, std::abs(mean - 0.3), 1e-12);
}

TEST(Rate, DirectionSupersetIsMonotone) {
  const Kernel k = make_sigmoid_kernel(3.0, 0.5);
  const auto s = sample_bipartite(k, 40, 40, 6);
  const auto few = rate_directions(7, 3), many = rate_directions(7, 8);
  ASSERT_EQ(few.size(), 5u);
  ASSERT_EQ(many.size(), 10u);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(few[j].matrix(), many[j].matrix());
  const ClassCounts mu({20, 20});
  const SupportOptions opts{SupportMethod::kAlternating, 16, 1};
  EXPECT_LE(sup_support_gap(s.a, k, mu, mu, few, opts, 64), sup_support_gap(s.a, k, mu, mu, many, opts, 64));
}

TEST(Rate, LogLogSlope) {
  EXPECT_NEAR(loglog_slope({10, 100, 1000}, {1, 0.1, 0.01}), -1.0, 1e-12);
  EXPECT_NEAR(loglog_slope({2, 8}, {3, 6}), 0.5, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), std::invalid_argument);
  EXPECT_EQ(median_of({3, 1, 2}), 2.0);
  EXPECT_EQ(median_of({4, 1, 2, 3}), 2.5);
}

TEST(Rate, RejectsClampedKernels) {
  auto c = parse("betas = 1\nn_grid = 20\nreps = 1\n");
  EXPECT_THROW(run_rate_experiment(c), std::exception);
}

TEST(Summarize, MedianAndQuartiles) {
  const auto s = summarize(table("beta,n,sup_gap\n3,10,1\n3,10,3\n3,10,2\n3,20,4\n"), {"beta", "n"});
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.rows[0].metrics[0].median, 2.0);
  EXPECT_EQ(s.rows[0].metrics[0].q1, 1.5);
  EXPECT_EQ(s.rows[0].metrics[0].q3, 2.5);
  EXPECT_EQ(s.rows[1].metrics[0].median, 4.0);
}

TEST(Summarize, NumericKeyOrderAndInvariance) {
  const auto a = summarize(table("n,sup_gap\n100,1\n20,2\n100,3\n"), {"n"});
  const auto b = summarize(table("n,sup_gap\n100,3\n100,1\n20,2\n"), {"n"});
  ASSERT_EQ(a.rows.size(), 2u);
  EXPECT_EQ(a.rows[0].key[0], "20");
  std::ostringstream x, y;
  write_summary_csv(x, a);
  write_summary_csv(y, b);
  EXPECT_EQ(x.str(), y.str());
  EXPECT_NE(x.str().find("sup_gap_median"), std::string::npos);
}

TEST(Summarize, EmptyGroupWarns) {
  const auto s = summarize(table("n,sup_gap\n10,nan\n20,1\n"), {"n"});
  ASSERT_EQ(s.rows.size(), 1u);
  ASSERT_EQ(s.warnings.size(), 1u);
  EXPECT_NE(s.warnings[0].find("n=10"), std::string::npos);
}

TEST(Summarize, SchemaErrorNamesColumn) {
  try {
    summarize(table("beta,sup_gap\n3,1\n"), {"rho_mode"});
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("rho_mode"), std::string::npos);
  }
  EXPECT_THROW(summarize(table("beta,objective\n3,1\n"), {"beta"}), std::exception);
}
