#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "sunny/error.hpp"
#include "sunny/metrics.hpp"
#include "sunny/random.hpp"
#include "sunny/synthetic.hpp"

namespace sunny {
namespace {

using testing::first_five;
using testing::toy_scenario;

Schedule toy_schedule() {
  // A4, A1, A3, A2 -> indices 3, 0, 2, 1
  return Schedule{{{3, 600}, {0, 600}, {2, 300}, {1, 300}}};
}

TEST(Metrics, ParValue) {
  EXPECT_EQ(par_value(122, true, 1800, 10), 122.0);
  EXPECT_EQ(par_value(1800, false, 1800, 10), 18000.0);
  // A run finishing exactly at the timeout is not a solve.
  EXPECT_EQ(par_value(1800, true, 1800, 10), 18000.0);
  EXPECT_EQ(par_value(5, false, 100, 2), 200.0);
}

TEST(Metrics, SimulateToySchedule) {
  const auto s = toy_scenario();
  const auto sched = toy_schedule();
  const auto x4 = simulate_schedule(sched, s, 3, false);
  EXPECT_TRUE(x4.solved);
  EXPECT_EQ(x4.effective_time, 122.0);
  EXPECT_EQ(x4.solving_algorithm, AlgorithmIndex{3});

  const auto x3 = simulate_schedule(sched, s, 2, false);
  EXPECT_TRUE(x3.solved);
  EXPECT_EQ(x3.effective_time, 603.0);
  EXPECT_EQ(x3.solving_algorithm, AlgorithmIndex{0});

  const auto x5 = simulate_schedule(sched, s, 4, false);
  EXPECT_TRUE(x5.solved);
  EXPECT_EQ(x5.effective_time, 60.0);

  const auto x2 = simulate_schedule(sched, s, 1, false);
  EXPECT_FALSE(x2.solved);
  EXPECT_EQ(x2.failure, FailureKind::insufficient_time);
  EXPECT_EQ(x2.effective_time, 1800.0);

  const auto x1 = simulate_schedule(sched, s, 0, false);
  EXPECT_FALSE(x1.solved);
  EXPECT_EQ(x1.failure, FailureKind::wrong_solvers);
}

TEST(Metrics, FeatureCostIsPaidFirst) {
  const auto s = toy_scenario(false, true);  // cost 10 per instance
  const auto sched = toy_schedule();
  EXPECT_EQ(simulate_schedule(sched, s, 3, true).effective_time, 132.0);
  EXPECT_EQ(simulate_schedule(sched, s, 3, false).effective_time, 122.0);
  EXPECT_EQ(simulate_schedule(sched, s, 2, true).effective_time, 613.0);
}

TEST(Metrics, FailureNames) {
  EXPECT_STREQ(to_string(FailureKind::wrong_solvers), "WrongSolvers");
  EXPECT_STREQ(to_string(FailureKind::insufficient_time), "InsufficientTime");
}

TEST(Metrics, VbsOnToyTable) {
  const auto s = toy_scenario();
  const auto inst = first_five();
  // (18000 + 593 + 3 + 122 + 60) / 5
  EXPECT_DOUBLE_EQ(vbs_par(s, inst, 10), 3755.6);
}

TEST(Metrics, SbsOnToyTable) {
  const auto s = toy_scenario();
  const auto inst = first_five();
  const auto best = sbs(s, inst, 10);
  EXPECT_EQ(best.algorithm, 3u);
  EXPECT_DOUBLE_EQ(best.par, 54182.0 / 5.0);
}

TEST(Metrics, SbsTieGoesToSmallerId) {
  const auto s = toy_scenario();
  const std::vector<InstanceIndex> only_x1{0};
  EXPECT_EQ(sbs(s, only_x1, 10).algorithm, 0u);
}

TEST(Metrics, ClosedGap) {
  EXPECT_DOUBLE_EQ(closed_gap(10, 4, 2), 0.75);
  EXPECT_DOUBLE_EQ(closed_gap(10, 2, 2), 1.0);
  EXPECT_DOUBLE_EQ(closed_gap(10, 10, 2), 0.0);
  EXPECT_DOUBLE_EQ(closed_gap(10, 14, 2), -0.5);
  EXPECT_THROW(closed_gap(5, 5, 5), UndefinedBaselineError);
  EXPECT_THROW(closed_gap(4, 5, 5), UndefinedBaselineError);
}

TEST(Metrics, CmpValues) {
  EXPECT_NEAR(cmp_delta(1, 2, 10, 0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(cmp_delta(2, 1, 10, 0), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(cmp_delta(10, 2, 10, 0), 0.0);
  EXPECT_EQ(cmp_delta(3, 10, 10, 0), 1.0);
  EXPECT_EQ(cmp_delta(10, 10, 10, 0), 0.0);
  EXPECT_EQ(cmp_delta(4, 5, 10, 1), 0.5);
  // Timeouts are never rescued by the tolerance.
  EXPECT_EQ(cmp_delta(10, 9.5, 10, 5), 0.0);
  EXPECT_EQ(cmp_delta(9.5, 10, 10, 5), 1.0);
}

TEST(Metrics, CmpReversalProperty) {
  SplitMix64 rng(42);
  for (int n = 0; n < 10000; ++n) {
    const double tau = 100;
    const double t = rng.uniform(0.0, 99.9);
    const double u = rng.uniform(0.0, 99.9);
    const double delta = n % 2 ? 0.0 : rng.uniform(0.0, 10.0);
    EXPECT_NEAR(cmp_delta(t, u, tau, delta) + cmp_delta(u, t, tau, delta), 1.0, 1e-12);
  }
}

// Selector times: S0 = [1, 10], S1 = [2, 4], S2 = [2, 10], timeout 10.
std::vector<std::vector<double>> three_selector_table() { return {{1, 10}, {2, 4}, {2, 10}}; }

TEST(Metrics, BordaHandEnumerated) {
  const auto b = borda_table(three_selector_table(), 10, 0);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_NEAR(b[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(b[1], 17.0 / 12.0, 1e-12);
  EXPECT_NEAR(b[2], 5.0 / 12.0, 1e-12);
}

TEST(Metrics, BordaWideDeltaTiesEverything) {
  const auto b = borda_table(three_selector_table(), 10, 1);
  EXPECT_NEAR(b[0], 0.5, 1e-12);
  EXPECT_NEAR(b[1], 1.5, 1e-12);
  EXPECT_NEAR(b[2], 0.5, 1e-12);
}

TEST(Metrics, BordaInstanceSumInvariantUnderRelabeling) {
  SplitMix64 rng(12);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<double>> times(4, std::vector<double>(6));
    for (auto& row : times)
      for (auto& x : row) x = rng.below(4) == 0 ? 100.0 : static_cast<double>(rng.below(100));
    const double delta = static_cast<double>(rng.below(20));
    const auto b = borda_table(times, 100, delta);
    auto perm = times;
    std::swap(perm[0], perm[3]);
    std::swap(perm[1], perm[2]);
    const auto c = borda_table(perm, 100, delta);
    EXPECT_NEAR(b[0] + b[1] + b[2] + b[3], c[0] + c[1] + c[2] + c[3], 1e-12);
    EXPECT_NEAR(b[0], c[3], 1e-12);
    EXPECT_NEAR(b[1], c[2], 1e-12);
  }
}

TEST(Metrics, DominantAlgorithmIsSbs) {
  SyntheticConfig cfg;
  cfg.n_instances = 40;
  cfg.n_algorithms = 3;
  cfg.dominance = 1.0;
  cfg.other_timeout = 1.0;
  const auto base = generate_synthetic_scenario(cfg);
  // Cluster 1 only: its dominant algorithm solves every instance fast.
  std::vector<InstanceIndex> cluster;
  for (InstanceIndex i = 1; i < 40; i += 3) cluster.push_back(i);
  EXPECT_EQ(sbs(base, cluster, 10).algorithm, 1u);
}

TEST(Metrics, BordaSingleSelectorScoresZero) {
  EXPECT_EQ(borda_table({{1, 2, 3}}, 10, 0), std::vector<double>{0.0});
}

TEST(Metrics, AggregateOnToySchedule) {
  const auto s = toy_scenario();
  const auto sched = toy_schedule();
  std::vector<SimulationOutcome> out;
  for (auto i : first_five()) out.push_back(simulate_schedule(sched, s, i, false));
  const auto agg = aggregate_scores(s, out, 10);
  // (18000 + 18000 + 603 + 122 + 60) / 5
  EXPECT_DOUBLE_EQ(agg.par, 36785.0 / 5.0);
  EXPECT_DOUBLE_EQ(agg.solved_fraction, 0.6);
  EXPECT_DOUBLE_EQ(agg.m_vbs, 3755.6);
  EXPECT_DOUBLE_EQ(agg.m_sbs, 54182.0 / 5.0);
  ASSERT_TRUE(agg.closed_gap.has_value());
  EXPECT_NEAR(*agg.closed_gap, (54182.0 - 36785.0) / (54182.0 - 18778.0), 1e-12);
}

TEST(Metrics, AggregateUndefinedGap) {
  const auto s = toy_scenario();
  const std::vector<SimulationOutcome> out{simulate_schedule(toy_schedule(), s, 0, false)};
  EXPECT_FALSE(aggregate_scores(s, out, 10).closed_gap.has_value());
}

}  // namespace
}  // namespace sunny
