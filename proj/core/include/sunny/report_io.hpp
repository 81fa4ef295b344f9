#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "sunny/metrics.hpp"
#include "sunny/scenario.hpp"
#include "sunny/training.hpp"

namespace sunny {

// Shortest round-trip decimal form; stable across runs and platforms.
std::string format_number(double value);

std::string model_to_json(const LearnedModel& model, const Scenario& scenario);
// Resolves names against `scenario`; throws ScenarioError on a mismatch.
LearnedModel model_from_json(const std::string& text, const Scenario& scenario);
void save_model(const LearnedModel& model, const Scenario& scenario, const std::filesystem::path& path);
LearnedModel load_model(const std::filesystem::path& path, const Scenario& scenario);

// One row per instance followed by an aggregate row.
void write_outcomes_csv(std::ostream& out, const Scenario& scenario,
                        std::span<const SimulationOutcome> outcomes, const AggregateScores& scores,
                        double lambda);
std::string outcomes_to_json(const Scenario& scenario, std::span<const SimulationOutcome> outcomes,
                             const AggregateScores& scores, double lambda);

// instance_id,seconds with the timeout for unsolved instances.
void write_times_csv(std::ostream& out, const Scenario& scenario,
                     std::span<const SimulationOutcome> outcomes);

// One row per repetition x fold. Deterministic: no wall-clock data.
void write_experiment_csv(std::ostream& out, const ExperimentReport& report, const Scenario& scenario);
std::string experiment_to_json(const ExperimentReport& report, const Scenario& scenario);
// Wall-clock timings kept apart from the deterministic reports.
void write_timings_csv(std::ostream& out, const ExperimentReport& report);

std::string config_to_json(const TrainingConfig& config);

}  // namespace sunny
