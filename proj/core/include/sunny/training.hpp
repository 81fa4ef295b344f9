#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sunny/metrics.hpp"
#include "sunny/scenario.hpp"
#include "sunny/schedule.hpp"
#include "sunny/sunny.hpp"

namespace sunny {

enum class SplitMode { random, stratified, rank };
enum class LearningMode { k_only, f_only, fk, none };

std::string_view to_string(SplitMode mode);
std::string_view to_string(LearningMode mode);
SplitMode parse_split_mode(std::string_view text);
LearningMode parse_learning_mode(std::string_view text);

struct TrainingConfig {
  SplitMode split_mode = SplitMode::rank;
  std::size_t instance_limit = 700;
  std::size_t feature_limit = 5;
  std::size_t k_max = 30;
  std::size_t schedule_limit = 3;
  std::uint64_t seed = 100;
  double time_cap_seconds = 24.0 * 3600.0;
  LearningMode learning_mode = LearningMode::fk;
  Engine engine_train = Engine::greedy;
  Engine engine_test = Engine::greedy;
  // Charge per-instance feature cost when simulating schedules. Only takes
  // effect when the scenario has feature costs.
  bool charge_feature_cost = true;
  double par_penalty = kDefaultParPenalty;
  std::size_t outer_folds = 5;
  std::size_t inner_folds = 10;
  std::size_t repetitions = 5;
  // Worker threads for run_nested_cv; 0 = hardware concurrency.
  std::size_t jobs = 0;
};

// Drops unsolvable instances, associates each remaining one with its fastest
// solver, orders every solver's list hardest first and draws round-robin over
// solvers until `instance_limit` instances are taken.
std::vector<InstanceIndex> prepare_training_set(const Scenario& scenario,
                                                std::span<const InstanceIndex> train,
                                                std::size_t instance_limit);

// Fastest solver among those solving the instance (ties: smaller id).
std::optional<AlgorithmIndex> best_solver(const Scenario& scenario, InstanceIndex instance);

// Sum over algorithms of the timeout-capped runtime.
double hardness(const Scenario& scenario, InstanceIndex instance);

// Partitions `instances` into n_folds folds whose sizes differ by at most one.
std::vector<std::vector<InstanceIndex>> split_folds(const Scenario& scenario,
                                                    std::span<const InstanceIndex> instances,
                                                    SplitMode mode, std::size_t n_folds,
                                                    std::uint64_t seed);

// Everything get_score needs besides the candidate (features, k).
struct ScoringContext {
  const Scenario* scenario = nullptr;
  std::vector<InstanceIndex> train;
  std::vector<InstanceIndex> validation;
  Engine engine = Engine::greedy;
  std::size_t schedule_limit = 3;
  bool charge_feature_cost = true;
  double par_penalty = kDefaultParPenalty;
};

// Negated mean PAR on the validation set of the selector fitted on the train
// set with (features, k). Greater is better. Reference implementation.
double get_score(const ScoringContext& context, std::size_t k, std::span<const std::size_t> features);

// Same value as get_score, computed with the feature transform fitted once and
// the neighbor ordering of the last feature set cached. Counts evaluations.
class ValidationScorer {
 public:
  explicit ValidationScorer(ScoringContext context);

  double score(std::size_t k, std::span<const std::size_t> features);

  [[nodiscard]] std::size_t evaluations() const noexcept { return evaluations_; }
  [[nodiscard]] const std::vector<std::size_t>& feature_pool() const noexcept { return pool_; }
  [[nodiscard]] std::size_t train_size() const noexcept { return context_.train.size(); }

 private:
  void prepare_neighbors(std::span<const std::size_t> features);

  ScoringContext context_;
  FeatureTransform transform_;
  Matrix<double> train_scaled_;       // train x all features
  Matrix<double> validation_scaled_;  // validation x all features
  std::vector<std::size_t> pool_;
  AlgorithmIndex backup_ = 0;

  std::vector<std::size_t> cached_features_;
  bool cache_valid_ = false;
  std::vector<double> prefix_distances_;     // validation x train, squared
  std::vector<std::size_t> prefix_features_;
  std::vector<std::vector<InstanceIndex>> ordered_neighbors_;  // per validation instance
  std::size_t evaluations_ = 0;
};

struct LearnResult {
  std::vector<std::size_t> features;  // acceptance order
  std::size_t k = 1;
  double score = 0.0;
  std::vector<double> score_trace;  // bestScore after each accepted feature
  std::size_t evaluations = 0;
  bool timed_out = false;
};

using Clock = std::chrono::steady_clock;

// Integrated forward feature selection and k search. Scans every remaining
// pool feature crossed with k in [1, k_max]; the first strict improvement wins
// ties. Stops when a round cannot beat the incumbent, at max_features, or at
// the deadline (keeping the incumbent).
LearnResult learn_fk(ValidationScorer& scorer, std::span<const std::size_t> pool, std::size_t k_max,
                     std::size_t max_features, Clock::time_point deadline = Clock::time_point::max());

// k in [1, k_max] with every pool feature; ties go to the smaller k.
LearnResult learn_k(ValidationScorer& scorer, std::span<const std::size_t> pool, std::size_t k_max,
                    Clock::time_point deadline = Clock::time_point::max());

// Forward feature selection with k fixed to default_k(train size).
LearnResult learn_f(ValidationScorer& scorer, std::span<const std::size_t> pool,
                    std::size_t max_features, Clock::time_point deadline = Clock::time_point::max());

struct SeedLineage {
  std::uint64_t seed = 0;
  std::optional<std::size_t> repetition;
  std::optional<std::size_t> fold;
};

struct LearnedModel {
  std::string scenario_name;
  LearningMode learning_mode = LearningMode::fk;
  std::vector<std::size_t> features;  // original feature indices
  std::size_t k = 1;
  AlgorithmIndex backup = 0;
  Engine engine = Engine::greedy;
  std::size_t schedule_limit = 3;
  std::vector<InstanceIndex> training;  // prepared training instances
  SeedLineage lineage;
  double validation_score = 0.0;  // NaN-free; 0 when no validation happened
  bool timed_out = false;
};

// Data preparation, inner cross-validation and configuration choice on
// `train`. The returned model is fitted on the whole prepared set.
LearnedModel train_model(const Scenario& scenario, std::span<const InstanceIndex> train,
                         const TrainingConfig& config, SeedLineage lineage,
                         Clock::time_point deadline = Clock::time_point::max());

// As above with the preparation and inner split already done.
LearnedModel train_model(const Scenario& scenario, std::span<const InstanceIndex> prepared_train,
                         const std::vector<std::vector<InstanceIndex>>& inner_folds,
                         const TrainingConfig& config, SeedLineage lineage,
                         Clock::time_point deadline = Clock::time_point::max());

Selector make_selector(const Scenario& scenario, const LearnedModel& model);

enum class FoldStatus { ok, timeout };

struct FoldResult {
  std::size_t repetition = 0;
  std::size_t fold = 0;
  FoldStatus status = FoldStatus::ok;
  std::vector<InstanceIndex> test;
  LearnedModel model;
  std::vector<Schedule> schedules;  // parallel to test
  std::vector<SimulationOutcome> outcomes;
  AggregateScores scores;
  double closed_gap = 0.0;  // 0 on timeout
  bool closed_gap_defined = true;
  double wall_seconds = 0.0;
};

struct ExperimentReport {
  std::string scenario_name;
  TrainingConfig config;
  std::vector<FoldResult> folds;  // repetition-major

  // Mean over folds with a defined closed gap (timeouts count as 0).
  [[nodiscard]] double mean_closed_gap() const;
  [[nodiscard]] double mean_par() const;
  [[nodiscard]] double mean_solved_fraction() const;
};

struct OuterFold {
  std::vector<InstanceIndex> train;
  std::vector<InstanceIndex> test;
  std::vector<InstanceIndex> prepared_train;  // prepare_training_set(train)
  std::vector<std::vector<InstanceIndex>> inner;  // partition of prepared_train
};

struct FoldPlan {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::vector<OuterFold> folds;
};

// Outer folds are a seeded random partition of all instances (unsolvable ones
// stay in the test sets); inner folds split each prepared outer-train set with
// the configured split mode.
FoldPlan make_fold_plan(const Scenario& scenario, std::size_t repetition, const TrainingConfig& config);

ExperimentReport run_nested_cv(const Scenario& scenario, const TrainingConfig& config);

}  // namespace sunny
