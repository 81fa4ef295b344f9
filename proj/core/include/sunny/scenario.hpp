#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sunny/matrix.hpp"

namespace sunny {

using InstanceIndex = std::size_t;
using AlgorithmIndex = std::size_t;

// Raw material for a Scenario. Scenario::create validates it.
struct ScenarioData {
  std::string name;
  std::vector<std::string> instance_ids;
  std::vector<std::string> algorithm_ids;
  std::vector<std::string> feature_names;
  Matrix<double> runtime;          // instance x algorithm, seconds
  Matrix<std::uint8_t> solved;     // instance x algorithm
  Matrix<double> features;         // instance x feature, NaN = missing
  std::optional<std::vector<double>> feature_cost;
  double timeout = 0.0;
};

// Runtime algorithm-selection scenario. Immutable once built.
//
// Algorithms are stored in lexicographic id order, so comparing algorithm
// indices is the same as comparing ids. Unsolved cells hold the timeout.
class Scenario {
 public:
  // Validates invariants and canonicalises algorithm order. Solved cells whose
  // runtime exceeds the timeout are demoted to unsolved.
  static Scenario create(ScenarioData data);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t num_instances() const noexcept { return instance_ids_.size(); }
  [[nodiscard]] std::size_t num_algorithms() const noexcept { return algorithm_ids_.size(); }
  [[nodiscard]] std::size_t num_features() const noexcept { return feature_names_.size(); }

  [[nodiscard]] const std::vector<std::string>& instance_ids() const noexcept { return instance_ids_; }
  [[nodiscard]] const std::vector<std::string>& algorithm_ids() const noexcept { return algorithm_ids_; }
  [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  [[nodiscard]] double timeout() const noexcept { return timeout_; }
  [[nodiscard]] double runtime(InstanceIndex i, AlgorithmIndex a) const { return runtime_(i, a); }
  [[nodiscard]] bool solved(InstanceIndex i, AlgorithmIndex a) const { return solved_(i, a) != 0; }
  // Runtime when solved, the timeout otherwise.
  [[nodiscard]] double effective_runtime(InstanceIndex i, AlgorithmIndex a) const {
    return solved(i, a) ? runtime_(i, a) : timeout_;
  }
  [[nodiscard]] std::span<const double> features(InstanceIndex i) const { return features_.row(i); }
  [[nodiscard]] const Matrix<double>& feature_matrix() const noexcept { return features_; }
  [[nodiscard]] bool has_feature_cost() const noexcept { return feature_cost_.has_value(); }
  [[nodiscard]] double feature_cost(InstanceIndex i) const {
    return feature_cost_ ? (*feature_cost_)[i] : 0.0;
  }

  [[nodiscard]] std::optional<InstanceIndex> instance_index(std::string_view id) const;
  [[nodiscard]] std::optional<AlgorithmIndex> algorithm_index(std::string_view id) const;
  [[nodiscard]] std::optional<std::size_t> feature_index(std::string_view name) const;

  [[nodiscard]] bool solvable(InstanceIndex i) const;

  // Copy restricted to the given instances, in the given order.
  [[nodiscard]] Scenario subset(std::span<const InstanceIndex> instances) const;
  // Copy without feature costs.
  [[nodiscard]] Scenario without_feature_cost() const;

  [[nodiscard]] std::vector<InstanceIndex> all_instances() const;

  // Missing feature cells (NaN) compare equal to each other.
  friend bool operator==(const Scenario&, const Scenario&);

 private:
  Scenario() = default;

  std::string name_;
  std::vector<std::string> instance_ids_;
  std::vector<std::string> algorithm_ids_;
  std::vector<std::string> feature_names_;
  Matrix<double> runtime_;
  Matrix<std::uint8_t> solved_;
  Matrix<double> features_;
  std::optional<std::vector<double>> feature_cost_;
  double timeout_ = 0.0;
};

// Loads an ASlib scenario directory (description.txt, algorithm_runs.arff,
// feature_values.arff, optional feature_costs.arff).
Scenario load_scenario(const std::filesystem::path& directory);

// Writes the same layout back out; load_scenario(save_scenario(s)) == s.
void save_scenario(const Scenario& scenario, const std::filesystem::path& directory);

// Instances solved by at least one algorithm, in input order.
std::vector<InstanceIndex> discard_unsolvable(const Scenario& scenario,
                                              std::span<const InstanceIndex> instances);

}  // namespace sunny
