#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "sunny/error.hpp"
#include "sunny/random.hpp"
#include "sunny/synthetic.hpp"
#include "sunny/training.hpp"

namespace sunny {
namespace {

using testing::first_five;
using testing::toy_scenario;

// n instances, algorithm "a" solves instance j in (j + 1) seconds and, when
// `labels` is given, algorithm "b" is faster on instances with label 1.
Scenario ladder_scenario(std::size_t n, const std::vector<int>& labels = {}) {
  ScenarioData d;
  d.name = "ladder";
  d.timeout = 1000;
  for (std::size_t i = 0; i < n; ++i) d.instance_ids.push_back("i" + std::to_string(i));
  d.algorithm_ids = {"a", "b"};
  d.feature_names = {"f"};
  d.runtime = Matrix<double>(n, 2, 1000);
  d.solved = Matrix<std::uint8_t>(n, 2, 0);
  d.features = Matrix<double>(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    d.features(i, 0) = static_cast<double>(i);
    d.runtime(i, 0) = static_cast<double>(i + 1);
    d.solved(i, 0) = 1;
    if (!labels.empty() && labels[i] == 1) {
      d.runtime(i, 1) = 0.5;
      d.solved(i, 1) = 1;
    }
  }
  return Scenario::create(std::move(d));
}

TEST(Prepare, ToyTableAssociations) {
  const auto s = toy_scenario();
  EXPECT_EQ(best_solver(s, 0), std::nullopt);
  EXPECT_EQ(best_solver(s, 1), AlgorithmIndex{1});
  EXPECT_EQ(best_solver(s, 2), AlgorithmIndex{0});
  EXPECT_EQ(best_solver(s, 3), AlgorithmIndex{3});
  EXPECT_EQ(best_solver(s, 4), AlgorithmIndex{3});
  const auto inst = first_five();
  // Lists: A1 [x3], A2 [x2], A4 [x4, x5] (hardest first); drawn round-robin.
  EXPECT_EQ(prepare_training_set(s, inst, 700), (std::vector<InstanceIndex>{2, 1, 3, 4}));
  EXPECT_EQ(prepare_training_set(s, inst, 3), (std::vector<InstanceIndex>{2, 1, 3}));
}

TEST(Prepare, NeverExceedsLimitAndDropsUnsolvable) {
  SyntheticConfig cfg;
  cfg.unsolvable_fraction = 0.2;
  const auto s = generate_synthetic_scenario(cfg);
  const auto all = s.all_instances();
  for (std::size_t limit : {1u, 17u, 100u, 1000u}) {
    const auto p = prepare_training_set(s, all, limit);
    EXPECT_LE(p.size(), limit);
    EXPECT_EQ(std::set<InstanceIndex>(p.begin(), p.end()).size(), p.size());
    for (auto i : p) EXPECT_TRUE(s.solvable(i));
  }
  EXPECT_EQ(prepare_training_set(s, all, 1000).size(), discard_unsolvable(s, all).size());
}

TEST(Hardness, SumOfCappedRuntimes) {
  const auto s = toy_scenario();
  EXPECT_EQ(hardness(s, 0), 4 * 1800.0);
  EXPECT_EQ(hardness(s, 3), 1800.0 + 1800.0 + 1452.0 + 122.0);
}

TEST(Split, RankDealsRoundRobin) {
  const auto s = ladder_scenario(10);
  const auto all = s.all_instances();
  const auto folds = split_folds(s, all, SplitMode::rank, 2, 1);
  // Hardness of instance j is 1000 + j + 1.
  EXPECT_EQ(folds[0], (std::vector<InstanceIndex>{9, 7, 5, 3, 1}));
  EXPECT_EQ(folds[1], (std::vector<InstanceIndex>{8, 6, 4, 2, 0}));
}

TEST(Split, StratifiedBalancesLabels) {
  const std::vector<int> labels{0, 1, 0, 0, 1, 0, 1, 0, 1, 0};  // 6 x a, 4 x b
  const auto s = ladder_scenario(10, labels);
  const auto all = s.all_instances();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto folds = split_folds(s, all, SplitMode::stratified, 2, seed);
    for (const auto& f : folds) {
      std::size_t b = 0;
      for (auto i : f) b += labels[i];
      EXPECT_EQ(f.size(), 5u);
      EXPECT_EQ(b, 2u);
    }
  }
}

TEST(Split, PartitionWithBalancedSizes) {
  SyntheticConfig cfg;
  cfg.n_instances = 53;
  const auto s = generate_synthetic_scenario(cfg);
  const auto all = s.all_instances();
  for (auto mode : {SplitMode::random, SplitMode::stratified, SplitMode::rank}) {
    for (std::size_t n : {2u, 5u, 10u}) {
      const auto folds = split_folds(s, all, mode, n, 7);
      ASSERT_EQ(folds.size(), n);
      std::vector<InstanceIndex> joined;
      std::size_t lo = all.size(), hi = 0;
      for (const auto& f : folds) {
        joined.insert(joined.end(), f.begin(), f.end());
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
      }
      std::sort(joined.begin(), joined.end());
      EXPECT_EQ(joined, all);
      EXPECT_LE(hi - lo, 1u);
    }
  }
  EXPECT_THROW(split_folds(s, all, SplitMode::random, 54, 1), Error);
}

TEST(Split, RankFoldsHaveComparableHardness) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testing::random_scenario(rng, 40, 3);
    const auto all = s.all_instances();
    const auto folds = split_folds(s, all, SplitMode::rank, 4, 0);
    // Dealing sorted values round-robin bounds the spread of fold sums by the
    // range of hardness values.
    double lo = 1e300, hi = -1e300, hmin = 1e300, hmax = -1e300;
    for (const auto& f : folds) {
      double sum = 0;
      for (auto i : f) {
        sum += hardness(s, i);
        hmin = std::min(hmin, hardness(s, i));
        hmax = std::max(hmax, hardness(s, i));
      }
      lo = std::min(lo, sum);
      hi = std::max(hi, sum);
    }
    EXPECT_LE(hi - lo, hmax - hmin + 1e-9);
  }
}

TEST(Modes, Names) {
  EXPECT_EQ(parse_learning_mode("fk"), LearningMode::fk);
  EXPECT_EQ(parse_learning_mode("k"), LearningMode::k_only);
  EXPECT_EQ(parse_learning_mode("f"), LearningMode::f_only);
  EXPECT_EQ(parse_learning_mode("none"), LearningMode::none);
  EXPECT_EQ(parse_split_mode("rank"), SplitMode::rank);
  EXPECT_EQ(to_string(SplitMode::stratified), "stratified");
  EXPECT_ANY_THROW(parse_split_mode("other"));
}

struct Fixture {
  Scenario scenario;
  ScoringContext context;
};

Fixture planted(std::size_t n = 80, std::uint64_t seed = 100) {
  SyntheticConfig cfg;
  cfg.n_instances = n;
  cfg.n_noise = 6;
  cfg.seed = seed;
  Fixture f{generate_synthetic_scenario(cfg), {}};
  f.context.scenario = &f.scenario;
  for (InstanceIndex i = 0; i < n; ++i) (i % 5 == 0 ? f.context.validation : f.context.train).push_back(i);
  return f;
}

TEST(Score, ScorerMatchesReference) {
  auto f = planted();
  f.context.scenario = &f.scenario;
  ValidationScorer scorer(f.context);
  SplitMix64 rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::size_t> feats;
    const std::size_t nf = 1 + rng.below(4);
    for (std::size_t j = 0; j < nf; ++j) {
      const auto c = static_cast<std::size_t>(rng.below(f.scenario.num_features()));
      if (std::find(feats.begin(), feats.end(), c) == feats.end()) feats.push_back(c);
    }
    // Repeat prefixes sometimes to exercise the distance cache.
    if (trial % 3 == 1) feats.insert(feats.begin(), 0);
    const std::size_t k = 1 + rng.below(20);
    ASSERT_DOUBLE_EQ(scorer.score(k, feats), get_score(f.context, k, feats)) << "trial " << trial;
  }
  EXPECT_EQ(scorer.evaluations(), 60u);
}

TEST(Score, Bounds) {
  auto f = planted();
  f.context.scenario = &f.scenario;
  const std::vector<std::size_t> feats{0, 1};
  const double sc = get_score(f.context, 5, feats);
  const double vbs = vbs_par(f.scenario, f.context.validation, 10);
  EXPECT_LE(sc, -vbs + 1e-9);
  EXPECT_GE(sc, -10 * f.scenario.timeout() - 1e-9);
}

TEST(Score, InformativeBeatsNoise) {
  auto f = planted();
  f.context.scenario = &f.scenario;
  const std::vector<std::size_t> informative{0};
  const std::vector<std::size_t> noise{5};
  EXPECT_GT(get_score(f.context, 5, informative), get_score(f.context, 5, noise));
}

TEST(Learn, FkCounterBoundAndMonotoneTrace) {
  for (std::uint64_t seed : {100u, 101u, 102u}) {
    auto f = planted(80, seed);
    f.context.scenario = &f.scenario;
    ValidationScorer scorer(f.context);
    const auto pool = scorer.feature_pool();
    for (std::size_t max_f : {1u, 3u, 5u}) {
      const std::size_t before = scorer.evaluations();
      const auto r = learn_fk(scorer, pool, 10, max_f);
      EXPECT_LE(r.evaluations, max_f * pool.size() * 10);
      EXPECT_EQ(r.evaluations, scorer.evaluations() - before);
      EXPECT_LE(r.features.size(), max_f);
      EXPECT_GE(r.features.size(), 1u);
      EXPECT_EQ(r.score_trace.size(), r.features.size());
      for (std::size_t j = 1; j < r.score_trace.size(); ++j) EXPECT_GT(r.score_trace[j], r.score_trace[j - 1]);
      EXPECT_EQ(r.score, r.score_trace.back());
      EXPECT_EQ(std::set<std::size_t>(r.features.begin(), r.features.end()).size(), r.features.size());
      EXPECT_GE(r.k, 1u);
      EXPECT_LE(r.k, 10u);
      EXPECT_FALSE(r.timed_out);
    }
  }
}

TEST(Learn, FkPicksInformativeFirst) {
  auto f = planted();
  f.context.scenario = &f.scenario;
  ValidationScorer scorer(f.context);
  const auto r = learn_fk(scorer, scorer.feature_pool(), 10, 3);
  EXPECT_LT(r.features.front(), 5u);
}

TEST(Learn, KTieGoesToSmallerK) {
  // One algorithm solves everything: every k scores the same.
  const auto s = ladder_scenario(20);
  ScoringContext ctx;
  ctx.scenario = &s;
  for (InstanceIndex i = 0; i < 20; ++i) (i % 2 ? ctx.validation : ctx.train).push_back(i);
  ValidationScorer scorer(ctx);
  const auto r = learn_k(scorer, scorer.feature_pool(), 8);
  EXPECT_EQ(r.k, 1u);
  EXPECT_EQ(r.evaluations, 8u);
}

TEST(Learn, KOneOnPureClusters) {
  SyntheticConfig cfg;
  cfg.n_instances = 60;
  cfg.dominance = 1.0;
  cfg.other_timeout = 1.0;
  cfg.cluster_spread = 0.0;
  cfg.n_noise = 0;
  const auto s = generate_synthetic_scenario(cfg);
  ScoringContext ctx;
  ctx.scenario = &s;
  for (InstanceIndex i = 0; i < 60; ++i) (i % 5 == 0 ? ctx.validation : ctx.train).push_back(i);
  ValidationScorer scorer(ctx);
  EXPECT_EQ(learn_k(scorer, scorer.feature_pool(), 20).k, 1u);
}

TEST(Learn, FStopsOnAllNoisePool) {
  auto f = planted();
  f.context.scenario = &f.scenario;
  ValidationScorer scorer(f.context);
  std::vector<std::size_t> noise;
  for (std::size_t j = 5; j < f.scenario.num_features(); ++j) noise.push_back(j);
  const auto r = learn_f(scorer, noise, noise.size());
  // Rounds scan the remaining pool; the run ends with the first round that
  // cannot improve, well before the pool is exhausted.
  EXPECT_LT(r.features.size(), noise.size());
  std::size_t expected = 0;
  for (std::size_t round = 0; round <= r.features.size() && round < noise.size(); ++round) {
    expected += noise.size() - round;
  }
  EXPECT_EQ(r.evaluations, expected);
}

TEST(Learn, FUsesDefaultK) {
  auto f = planted();
  f.context.scenario = &f.scenario;
  ValidationScorer scorer(f.context);
  const auto r = learn_f(scorer, scorer.feature_pool(), 2);
  EXPECT_EQ(r.k, default_k(f.context.train.size()));
  EXPECT_LE(r.evaluations, 2 * scorer.feature_pool().size());
}

TEST(Learn, ExpiredDeadlineKeepsFallback) {
  auto f = planted();
  f.context.scenario = &f.scenario;
  ValidationScorer scorer(f.context);
  const auto r = learn_fk(scorer, scorer.feature_pool(), 10, 3, Clock::now() - std::chrono::seconds(1));
  EXPECT_TRUE(r.timed_out);
  EXPECT_FALSE(r.features.empty());
}

TEST(TrainModel, NoLeakageAndDeterministic) {
  SyntheticConfig cfg;
  cfg.n_instances = 60;
  cfg.n_noise = 4;
  const auto s = generate_synthetic_scenario(cfg);
  std::vector<InstanceIndex> train, test;
  for (InstanceIndex i = 0; i < 60; ++i) (i % 5 == 0 ? test : train).push_back(i);
  TrainingConfig tc;
  tc.k_max = 8;
  tc.feature_limit = 3;
  tc.inner_folds = 4;
  const auto a = train_model(s, train, tc, SeedLineage{7, 0, 0});
  const auto b = train_model(s, train, tc, SeedLineage{7, 0, 0});
  const std::set<InstanceIndex> train_set(train.begin(), train.end());
  for (auto i : a.training) EXPECT_TRUE(train_set.count(i));
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.k, b.k);
  EXPECT_EQ(a.backup, b.backup);
  EXPECT_EQ(a.training, b.training);
  EXPECT_EQ(a.validation_score, b.validation_score);
  EXPECT_EQ(a.backup, backup_solver(s, a.training, 10));
}

TEST(TrainModel, NoneModeUsesAllFeaturesAndDefaultK) {
  SyntheticConfig cfg;
  cfg.n_instances = 60;
  cfg.n_noise = 4;
  const auto s = generate_synthetic_scenario(cfg);
  const auto all = s.all_instances();
  TrainingConfig tc;
  tc.learning_mode = LearningMode::none;
  const auto m = train_model(s, all, tc, SeedLineage{1, {}, {}});
  EXPECT_EQ(m.features.size(), s.num_features());
  EXPECT_EQ(m.k, default_k(m.training.size()));
}

TEST(FoldPlan, OuterPartitionAndInnerOfPrepared) {
  SyntheticConfig cfg;
  cfg.n_instances = 50;
  cfg.unsolvable_fraction = 0.1;
  const auto s = generate_synthetic_scenario(cfg);
  TrainingConfig tc;
  const auto plan = make_fold_plan(s, 2, tc);
  ASSERT_EQ(plan.folds.size(), 5u);
  std::vector<InstanceIndex> tests;
  for (const auto& f : plan.folds) {
    tests.insert(tests.end(), f.test.begin(), f.test.end());
    EXPECT_EQ(f.train.size() + f.test.size(), 50u);
    EXPECT_EQ(f.prepared_train, prepare_training_set(s, f.train, tc.instance_limit));
    std::vector<InstanceIndex> inner;
    for (const auto& g : f.inner) inner.insert(inner.end(), g.begin(), g.end());
    std::sort(inner.begin(), inner.end());
    auto prepared = f.prepared_train;
    std::sort(prepared.begin(), prepared.end());
    EXPECT_EQ(inner, prepared);
  }
  std::sort(tests.begin(), tests.end());
  EXPECT_EQ(tests, s.all_instances());
  const auto again = make_fold_plan(s, 2, tc);
  EXPECT_EQ(again.folds[3].test, plan.folds[3].test);
  EXPECT_NE(make_fold_plan(s, 1, tc).folds[0].test, plan.folds[0].test);
}

}  // namespace
}  // namespace sunny
