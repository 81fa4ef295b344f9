#include "sunny/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "sunny/error.hpp"
#include "sunny/log.hpp"
#include "sunny/preprocess.hpp"
#include "sunny/random.hpp"

namespace sunny {

std::string_view to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::random: return "random";
    case SplitMode::stratified: return "stratified";
    case SplitMode::rank: return "rank";
  }
  return "?";
}

std::string_view to_string(LearningMode mode) {
  switch (mode) {
    case LearningMode::k_only: return "k";
    case LearningMode::f_only: return "f";
    case LearningMode::fk: return "fk";
    case LearningMode::none: return "none";
  }
  return "?";
}

SplitMode parse_split_mode(std::string_view text) {
  if (text == "random") return SplitMode::random;
  if (text == "stratified") return SplitMode::stratified;
  if (text == "rank") return SplitMode::rank;
  throw ConfigError("unknown split mode '" + std::string(text) + "' (expected random, stratified or rank)");
}

LearningMode parse_learning_mode(std::string_view text) {
  if (text == "k" || text == "k_only") return LearningMode::k_only;
  if (text == "f" || text == "f_only") return LearningMode::f_only;
  if (text == "fk") return LearningMode::fk;
  if (text == "none") return LearningMode::none;
  throw ConfigError("unknown learning mode '" + std::string(text) + "' (expected k, f, fk or none)");
}

std::optional<AlgorithmIndex> best_solver(const Scenario& scenario, InstanceIndex instance) {
  std::optional<AlgorithmIndex> best;
  for (std::size_t a = 0; a < scenario.num_algorithms(); ++a) {
    if (!scenario.solved(instance, a)) continue;
    if (!best || scenario.runtime(instance, a) < scenario.runtime(instance, *best)) best = a;
  }
  return best;
}

double hardness(const Scenario& scenario, InstanceIndex instance) {
  double total = 0.0;
  for (std::size_t a = 0; a < scenario.num_algorithms(); ++a) total += scenario.effective_runtime(instance, a);
  return total;
}

std::vector<InstanceIndex> prepare_training_set(const Scenario& scenario, std::span<const InstanceIndex> train,
                                                std::size_t instance_limit) {
  const std::size_t m = scenario.num_algorithms();
  std::vector<std::vector<InstanceIndex>> lists(m);
  for (auto i : train) {
    if (auto a = best_solver(scenario, i)) lists[*a].push_back(i);
  }
  for (std::size_t a = 0; a < m; ++a) {
    std::stable_sort(lists[a].begin(), lists[a].end(), [&](InstanceIndex x, InstanceIndex y) {
      return scenario.runtime(x, a) > scenario.runtime(y, a);
    });
  }
  std::vector<InstanceIndex> out;
  std::vector<std::size_t> cursor(m, 0);
  bool progressed = true;
  while (out.size() < instance_limit && progressed) {
    progressed = false;
    for (std::size_t a = 0; a < m && out.size() < instance_limit; ++a) {
      if (cursor[a] < lists[a].size()) {
        out.push_back(lists[a][cursor[a]++]);
        progressed = true;
      }
    }
  }
  return out;
}

std::vector<std::vector<InstanceIndex>> split_folds(const Scenario& scenario, std::span<const InstanceIndex> instances,
                                                    SplitMode mode, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error("split_folds: need at least two folds");
  if (n_folds > instances.size()) {
    throw Error("split_folds: " + std::to_string(n_folds) + " folds requested for " +
                std::to_string(instances.size()) + " instances");
  }
  std::vector<std::vector<InstanceIndex>> folds(n_folds);
  std::vector<InstanceIndex> order(instances.begin(), instances.end());
  SplitMix64 rng(seed);

  switch (mode) {
    case SplitMode::random:
      shuffle(std::span(order), rng);
      break;
    case SplitMode::stratified: {
      // Group by best-solver label (unsolvable last), shuffle within a label,
      // then deal with one running counter so both fold sizes and per-label
      // counts stay within one of each other.
      const std::size_t m = scenario.num_algorithms();
      std::vector<std::vector<InstanceIndex>> groups(m + 1);
      for (auto i : instances) groups[best_solver(scenario, i).value_or(m)].push_back(i);
      order.clear();
      for (auto& g : groups) {
        shuffle(std::span(g), rng);
        order.insert(order.end(), g.begin(), g.end());
      }
      break;
    }
    case SplitMode::rank: {
      std::vector<double> h(order.size());
      std::vector<std::size_t> pos(order.size());
      std::iota(pos.begin(), pos.end(), std::size_t{0});
      for (std::size_t p = 0; p < order.size(); ++p) h[p] = hardness(scenario, order[p]);
      std::stable_sort(pos.begin(), pos.end(), [&](std::size_t x, std::size_t y) { return h[x] > h[y]; });
      std::vector<InstanceIndex> ranked;
      ranked.reserve(order.size());
      for (auto p : pos) ranked.push_back(order[p]);
      order = std::move(ranked);
      break;
    }
  }
  for (std::size_t p = 0; p < order.size(); ++p) folds[p % n_folds].push_back(order[p]);
  return folds;
}

double get_score(const ScoringContext& context, std::size_t k, std::span<const std::size_t> features) {
  const Scenario& s = *context.scenario;
  if (context.train.empty()) throw Error("get_score: empty training set");
  if (context.validation.empty()) throw Error("get_score: empty validation set");
  SunnyParams params;
  params.k = k;
  params.features.assign(features.begin(), features.end());
  params.backup = backup_solver(s, context.train, context.par_penalty);
  params.schedule_limit = context.schedule_limit;
  params.engine = context.engine;
  const Selector selector(s, context.train, params);
  const bool charge = context.charge_feature_cost && s.has_feature_cost();
  double total = 0.0;
  for (auto v : context.validation) {
    const auto outcome = simulate_schedule(selector.schedule(v), s, v, charge);
    total += par_value(outcome, s.timeout(), context.par_penalty);
  }
  return -total / static_cast<double>(context.validation.size());
}

ValidationScorer::ValidationScorer(ScoringContext context) : context_(std::move(context)) {
  const Scenario& s = *context_.scenario;
  if (context_.train.empty()) throw Error("get_score: empty training set");
  if (context_.validation.empty()) throw Error("get_score: empty validation set");
  auto pre = preprocess_features(s, context_.train);
  transform_ = std::move(pre.transform);
  train_scaled_ = std::move(pre.scaled);
  validation_scaled_ = Matrix<double>(context_.validation.size(), s.num_features());
  for (std::size_t r = 0; r < context_.validation.size(); ++r) {
    const auto raw = s.features(context_.validation[r]);
    for (std::size_t f = 0; f < s.num_features(); ++f) validation_scaled_(r, f) = transform_.scale(f, raw[f]);
  }
  pool_ = transform_.kept_feature_indices();
  backup_ = backup_solver(s, context_.train, context_.par_penalty);
}

void ValidationScorer::prepare_neighbors(std::span<const std::size_t> features) {
  if (cache_valid_ && std::equal(features.begin(), features.end(), cached_features_.begin(), cached_features_.end())) {
    return;
  }
  const std::size_t nv = context_.validation.size();
  const std::size_t nt = context_.train.size();
  const auto prefix = features.first(features.size() - 1);

  // Squared distances accumulate feature by feature in the given order, which
  // reproduces knn's summation exactly.
  if (!std::equal(prefix.begin(), prefix.end(), prefix_features_.begin(), prefix_features_.end()) ||
      prefix_distances_.size() != nv * nt) {
    prefix_distances_.assign(nv * nt, 0.0);
    for (auto f : prefix) {
      for (std::size_t v = 0; v < nv; ++v) {
        const double q = validation_scaled_(v, f);
        double* row = prefix_distances_.data() + v * nt;
        for (std::size_t t = 0; t < nt; ++t) {
          const double diff = q - train_scaled_(t, f);
          row[t] += diff * diff;
        }
      }
    }
    prefix_features_.assign(prefix.begin(), prefix.end());
  }

  const std::size_t last = features.back();
  ordered_neighbors_.resize(nv);
  std::vector<std::pair<double, std::size_t>> d(nt);
  for (std::size_t v = 0; v < nv; ++v) {
    const double q = validation_scaled_(v, last);
    const double* row = prefix_distances_.data() + v * nt;
    for (std::size_t t = 0; t < nt; ++t) {
      const double diff = q - train_scaled_(t, last);
      d[t] = {row[t] + diff * diff, t};
    }
    std::sort(d.begin(), d.end());
    auto& out = ordered_neighbors_[v];
    out.resize(nt);
    for (std::size_t t = 0; t < nt; ++t) out[t] = context_.train[d[t].second];
  }
  cached_features_.assign(features.begin(), features.end());
  cache_valid_ = true;
}

double ValidationScorer::score(std::size_t k, std::span<const std::size_t> features) {
  if (k < 1) throw Error("get_score: k must be >= 1");
  if (features.empty()) throw Error("get_score: empty feature set");
  ++evaluations_;
  prepare_neighbors(features);
  const Scenario& s = *context_.scenario;
  SunnyParams params;
  params.k = k;
  params.backup = backup_;
  params.schedule_limit = context_.schedule_limit;
  params.engine = context_.engine;
  const bool charge = context_.charge_feature_cost && s.has_feature_cost();
  const std::size_t take = std::min(k, context_.train.size());
  double total = 0.0;
  for (std::size_t v = 0; v < context_.validation.size(); ++v) {
    const std::span<const InstanceIndex> nb(ordered_neighbors_[v].data(), take);
    const auto schedule = schedule_for_neighborhood(s, nb, params, s.timeout());
    const auto outcome = simulate_schedule(schedule, s, context_.validation[v], charge);
    total += par_value(outcome, s.timeout(), context_.par_penalty);
  }
  return -total / static_cast<double>(context_.validation.size());
}

namespace {

// Forward selection shared by learn_fk (ks = 1..k_max) and learn_f (ks = {k}).
LearnResult forward_select(ValidationScorer& scorer, std::span<const std::size_t> pool,
                           std::span<const std::size_t> ks, std::size_t max_features, Clock::time_point deadline) {
  LearnResult result;
  const std::size_t start_evals = scorer.evaluations();
  std::vector<std::size_t> remaining(pool.begin(), pool.end());
  std::vector<std::size_t> best_features;
  std::size_t best_k = 1;
  double best_score = -std::numeric_limits<double>::infinity();

  while (best_features.size() < max_features && !remaining.empty()) {
    double round_score = -std::numeric_limits<double>::infinity();
    std::size_t round_feature = 0;
    std::size_t round_k = 1;
    bool interrupted = false;
    std::vector<std::size_t> candidate = best_features;
    candidate.push_back(0);
    for (std::size_t p = 0; p < remaining.size(); ++p) {
      if (Clock::now() >= deadline) {
        interrupted = true;
        break;
      }
      candidate.back() = remaining[p];
      for (auto k : ks) {
        const double s = scorer.score(k, candidate);
        if (s > round_score) {
          round_score = s;
          round_feature = p;
          round_k = k;
        }
      }
    }
    if (interrupted) {
      result.timed_out = true;
      break;
    }
    if (round_score <= best_score) break;
    best_score = round_score;
    best_features.push_back(remaining[round_feature]);
    best_k = round_k;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(round_feature));
    result.score_trace.push_back(best_score);
  }

  if (best_features.empty()) {
    // Interrupted before anything was accepted: fall back to untrained SUNNY.
    best_features.assign(pool.begin(), pool.end());
    best_k = default_k(scorer.train_size());
    best_score = -std::numeric_limits<double>::infinity();
  }
  result.features = std::move(best_features);
  result.k = best_k;
  result.score = best_score;
  result.evaluations = scorer.evaluations() - start_evals;
  return result;
}

std::vector<std::size_t> k_range(std::size_t k_max, std::size_t train_size) {
  // k beyond the training size repeats the whole-set neighborhood.
  const std::size_t top = std::max<std::size_t>(1, std::min(k_max, train_size));
  std::vector<std::size_t> ks(top);
  std::iota(ks.begin(), ks.end(), std::size_t{1});
  return ks;
}

}  // namespace

LearnResult learn_fk(ValidationScorer& scorer, std::span<const std::size_t> pool, std::size_t k_max,
                     std::size_t max_features, Clock::time_point deadline) {
  if (pool.empty()) throw Error("learn_fk: empty feature pool");
  const auto ks = k_range(k_max, scorer.train_size());
  return forward_select(scorer, pool, ks, max_features, deadline);
}

LearnResult learn_f(ValidationScorer& scorer, std::span<const std::size_t> pool, std::size_t max_features,
                    Clock::time_point deadline) {
  if (pool.empty()) throw Error("learn_f: empty feature pool");
  const std::size_t k = default_k(scorer.train_size());
  return forward_select(scorer, pool, std::span(&k, 1), max_features, deadline);
}

LearnResult learn_k(ValidationScorer& scorer, std::span<const std::size_t> pool, std::size_t k_max,
                    Clock::time_point deadline) {
  if (pool.empty()) throw Error("learn_k: empty feature pool");
  LearnResult result;
  const std::size_t start_evals = scorer.evaluations();
  result.features.assign(pool.begin(), pool.end());
  result.k = default_k(scorer.train_size());
  result.score = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (auto k : k_range(k_max, scorer.train_size())) {
    if (Clock::now() >= deadline) {
      result.timed_out = true;
      break;
    }
    const double s = scorer.score(k, result.features);
    if (s > result.score) {
      result.score = s;
      result.k = k;
      any = true;
    }
  }
  if (any) result.score_trace.push_back(result.score);
  result.evaluations = scorer.evaluations() - start_evals;
  return result;
}

LearnedModel train_model(const Scenario& scenario, std::span<const InstanceIndex> prepared_train,
                         const std::vector<std::vector<InstanceIndex>>& inner_folds, const TrainingConfig& config,
                         SeedLineage lineage, Clock::time_point deadline) {
  if (prepared_train.empty()) throw Error("no solvable training instance");
  LearnedModel model;
  model.scenario_name = scenario.name();
  model.learning_mode = config.learning_mode;
  model.engine = config.engine_test;
  model.schedule_limit = config.schedule_limit;
  model.training.assign(prepared_train.begin(), prepared_train.end());
  model.lineage = lineage;
  model.backup = backup_solver(scenario, model.training, config.par_penalty);

  const auto full_pool = preprocess_features(scenario, model.training).transform.kept_feature_indices();
  model.features = full_pool;
  model.k = default_k(model.training.size());
  if (config.learning_mode == LearningMode::none) return model;
  if (inner_folds.size() < 2) throw Error("inner cross-validation needs at least two folds");

  const bool charge = config.charge_feature_cost && scenario.has_feature_cost();
  double best_validation = -std::numeric_limits<double>::infinity();
  bool chosen = false;
  for (std::size_t j = 0; j < inner_folds.size(); ++j) {
    ScoringContext ctx;
    ctx.scenario = &scenario;
    for (std::size_t o = 0; o < inner_folds.size(); ++o) {
      if (o != j) ctx.train.insert(ctx.train.end(), inner_folds[o].begin(), inner_folds[o].end());
    }
    ctx.validation = inner_folds[j];
    ctx.engine = config.engine_train;
    ctx.schedule_limit = config.schedule_limit;
    ctx.charge_feature_cost = charge;
    ctx.par_penalty = config.par_penalty;

    ValidationScorer scorer(ctx);
    LearnResult learned;
    switch (config.learning_mode) {
      case LearningMode::fk:
        learned = learn_fk(scorer, scorer.feature_pool(), config.k_max, config.feature_limit, deadline);
        break;
      case LearningMode::k_only:
        learned = learn_k(scorer, scorer.feature_pool(), config.k_max, deadline);
        break;
      case LearningMode::f_only:
        learned = learn_f(scorer, scorer.feature_pool(), config.feature_limit, deadline);
        break;
      case LearningMode::none: break;
    }
    model.timed_out = model.timed_out || learned.timed_out;

    // Configurations are compared on their own validation fold with the
    // engine used at test time.
    double validation = learned.score;
    if (config.engine_test != config.engine_train || !std::isfinite(validation)) {
      ctx.engine = config.engine_test;
      validation = get_score(ctx, learned.k, learned.features);
    }
    if (!chosen || validation > best_validation) {
      chosen = true;
      best_validation = validation;
      model.features = learned.features;
      model.k = learned.k;
    }
    if (Clock::now() >= deadline) {
      model.timed_out = true;
      break;
    }
  }
  model.validation_score = best_validation;
  return model;
}

LearnedModel train_model(const Scenario& scenario, std::span<const InstanceIndex> train,
                         const TrainingConfig& config, SeedLineage lineage, Clock::time_point deadline) {
  const auto prepared = prepare_training_set(scenario, train, config.instance_limit);
  if (prepared.empty()) throw Error("no solvable training instance");
  std::vector<std::vector<InstanceIndex>> inner;
  if (config.learning_mode != LearningMode::none) {
    const std::size_t n_inner = std::min(config.inner_folds, prepared.size());
    if (n_inner < 2) throw Error("training needs at least two solvable instances");
    inner = split_folds(scenario, prepared, config.split_mode, n_inner,
                        derive_seed(lineage.seed, lineage.repetition.value_or(0), lineage.fold.value_or(0) + 1));
  }
  return train_model(scenario, prepared, inner, config, lineage, deadline);
}

Selector make_selector(const Scenario& scenario, const LearnedModel& model) {
  SunnyParams params;
  params.k = model.k;
  params.features = model.features;
  params.backup = model.backup;
  params.schedule_limit = model.schedule_limit;
  params.engine = model.engine;
  return Selector(scenario, model.training, std::move(params));
}

FoldPlan make_fold_plan(const Scenario& scenario, std::size_t repetition, const TrainingConfig& config) {
  FoldPlan plan;
  plan.repetition = repetition;
  plan.seed = derive_seed(config.seed, repetition, 0);
  const auto all = scenario.all_instances();
  const auto outer = split_folds(scenario, all, SplitMode::random, config.outer_folds, plan.seed);
  for (std::size_t i = 0; i < outer.size(); ++i) {
    OuterFold fold;
    fold.test = outer[i];
    std::sort(fold.test.begin(), fold.test.end());
    std::vector<std::uint8_t> in_test(scenario.num_instances(), 0);
    for (auto t : fold.test) in_test[t] = 1;
    for (auto x : all) {
      if (!in_test[x]) fold.train.push_back(x);
    }
    fold.prepared_train = prepare_training_set(scenario, fold.train, config.instance_limit);
    const std::size_t n_inner = std::min(config.inner_folds, fold.prepared_train.size());
    if (config.learning_mode != LearningMode::none) {
      if (n_inner < 2) {
        throw Error("outer fold " + std::to_string(i) + " has fewer than two solvable training instances");
      }
      fold.inner = split_folds(scenario, fold.prepared_train, config.split_mode, n_inner,
                               derive_seed(config.seed, repetition, i + 1));
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

double ExperimentReport::mean_closed_gap() const {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& f : folds) {
    if (!f.closed_gap_defined) continue;
    total += f.closed_gap;
    ++n;
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

double ExperimentReport::mean_par() const {
  double total = 0.0;
  for (const auto& f : folds) total += f.scores.par;
  return folds.empty() ? 0.0 : total / static_cast<double>(folds.size());
}

double ExperimentReport::mean_solved_fraction() const {
  double total = 0.0;
  for (const auto& f : folds) total += f.scores.solved_fraction;
  return folds.empty() ? 0.0 : total / static_cast<double>(folds.size());
}

namespace {

FoldResult run_fold(const Scenario& scenario, const TrainingConfig& config, const OuterFold& fold,
                    std::size_t repetition, std::size_t index) {
  FoldResult result;
  result.repetition = repetition;
  result.fold = index;
  result.test = fold.test;
  const auto start = Clock::now();
  // Caps beyond ~30 years are treated as unlimited to keep the clock arithmetic in range.
  const auto deadline =
      config.time_cap_seconds > 1e9
          ? Clock::time_point::max()
          : start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config.time_cap_seconds));

  result.model = train_model(scenario, fold.prepared_train, fold.inner, config,
                             SeedLineage{config.seed, repetition, index}, deadline);
  const Selector selector = make_selector(scenario, result.model);
  const bool charge = config.charge_feature_cost && scenario.has_feature_cost();
  for (auto i : fold.test) {
    result.schedules.push_back(selector.schedule(i));
    result.outcomes.push_back(simulate_schedule(result.schedules.back(), scenario, i, charge));
  }
  result.scores = aggregate_scores(scenario, result.outcomes, config.par_penalty);
  if (result.model.timed_out) {
    // Training did not finish within the cap: score as the single best solver.
    result.status = FoldStatus::timeout;
    result.closed_gap = 0.0;
    result.closed_gap_defined = true;
  } else if (result.scores.closed_gap) {
    result.closed_gap = *result.scores.closed_gap;
  } else {
    result.closed_gap_defined = false;
  }
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace

ExperimentReport run_nested_cv(const Scenario& scenario, const TrainingConfig& config) {
  if (config.repetitions < 1) throw Error("run_nested_cv: need at least one repetition");
  ExperimentReport report;
  report.scenario_name = scenario.name();
  report.config = config;

  struct Task {
    std::size_t repetition;
    std::size_t fold;
  };
  std::vector<FoldPlan> plans;
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < config.repetitions; ++r) {
    plans.push_back(make_fold_plan(scenario, r, config));
    for (std::size_t f = 0; f < plans.back().folds.size(); ++f) tasks.push_back({r, f});
  }
  report.folds.resize(tasks.size());

  std::size_t jobs = config.jobs ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      try {
        const auto& task = tasks[t];
        report.folds[t] = run_fold(scenario, config, plans[task.repetition].folds[task.fold], task.repetition, task.fold);
        log_info("repetition " + std::to_string(task.repetition) + " fold " + std::to_string(task.fold) +
                 " done");
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

}  // namespace sunny
