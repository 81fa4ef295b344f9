#include <benchmark/benchmark.h>

#include "sunny/random.hpp"
#include "sunny/sunny.hpp"
#include "sunny/synthetic.hpp"
#include "sunny/training.hpp"

namespace {

using namespace sunny;

void BM_Knn(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 25;
  SplitMix64 rng(1);
  Matrix<double> train(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) train(r, c) = rng.uniform(-1, 1);
  std::vector<double> q(cols, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(knn(q, train, 16));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_Knn)->Arg(200)->Arg(700)->Arg(5000);

Scenario bench_scenario(std::size_t algorithms) {
  SyntheticConfig cfg;
  cfg.n_instances = 400;
  cfg.n_algorithms = algorithms;
  cfg.other_timeout = 0.5;
  return generate_synthetic_scenario(cfg);
}

void BM_SelectExhaustive(benchmark::State& state) {
  const auto s = bench_scenario(static_cast<std::size_t>(state.range(0)));
  std::vector<InstanceIndex> nb;
  for (InstanceIndex i = 0; i < 16; ++i) nb.push_back(i);
  for (auto _ : state) benchmark::DoNotOptimize(select_subset_exhaustive(s, nb));
}
BENCHMARK(BM_SelectExhaustive)->Arg(4)->Arg(8)->Arg(12);

void BM_SelectGreedy(benchmark::State& state) {
  const auto s = bench_scenario(static_cast<std::size_t>(state.range(0)));
  std::vector<InstanceIndex> nb;
  for (InstanceIndex i = 0; i < 16; ++i) nb.push_back(i);
  for (auto _ : state) benchmark::DoNotOptimize(select_subset_greedy(s, nb, 3));
}
BENCHMARK(BM_SelectGreedy)->Arg(4)->Arg(8)->Arg(12);

ScoringContext bench_context(const Scenario& s) {
  ScoringContext ctx;
  ctx.scenario = &s;
  for (InstanceIndex i = 0; i < s.num_instances(); ++i) (i % 10 == 0 ? ctx.validation : ctx.train).push_back(i);
  return ctx;
}

void BM_GetScoreReference(benchmark::State& state) {
  const auto s = bench_scenario(4);
  const auto ctx = bench_context(s);
  const std::vector<std::size_t> features{0, 1, 2};
  for (auto _ : state) benchmark::DoNotOptimize(get_score(ctx, 10, features));
}
BENCHMARK(BM_GetScoreReference);

void BM_ValidationScorerExtend(benchmark::State& state) {
  const auto s = bench_scenario(4);
  ValidationScorer scorer(bench_context(s));
  std::vector<std::size_t> features{0, 1, 2};
  benchmark::DoNotOptimize(scorer.score(10, features));
  std::size_t k = 1;
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score(k++ % 30 + 1, features));
}
BENCHMARK(BM_ValidationScorerExtend);

void BM_LearnFk(benchmark::State& state) {
  const auto s = bench_scenario(4);
  for (auto _ : state) {
    ValidationScorer scorer(bench_context(s));
    benchmark::DoNotOptimize(learn_fk(scorer, scorer.feature_pool(), 30, 5));
  }
}
BENCHMARK(BM_LearnFk)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
