#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sunny/matrix.hpp"
#include "sunny/scenario.hpp"

namespace sunny {

// Per-feature min-max scaling into [-1, 1] fitted on a set of rows, with
// missing values imputed by the fit-set median. Features constant on the fit
// set (or entirely missing there) are not kept and always map to 0.
class FeatureTransform {
 public:
  FeatureTransform() = default;
  // A feature is kept iff min < max; NaN bounds mark an all-missing feature.
  FeatureTransform(std::vector<double> min, std::vector<double> max, std::vector<double> median);

  [[nodiscard]] std::size_t num_features() const noexcept { return min_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& kept_feature_indices() const noexcept { return kept_; }
  [[nodiscard]] bool is_kept(std::size_t feature) const { return kept_flag_[feature] != 0; }

  [[nodiscard]] double min(std::size_t feature) const { return min_[feature]; }
  [[nodiscard]] double max(std::size_t feature) const { return max_[feature]; }
  [[nodiscard]] double median(std::size_t feature) const { return median_[feature]; }

  [[nodiscard]] double scale(std::size_t feature, double raw) const;
  // Scales every original feature of one raw row.
  [[nodiscard]] std::vector<double> apply(std::span<const double> raw) const;
  // Scales only `selected` features of one raw row, in that order.
  [[nodiscard]] std::vector<double> apply(std::span<const double> raw,
                                          std::span<const std::size_t> selected) const;

  friend bool operator==(const FeatureTransform&, const FeatureTransform&) = default;

 private:
  std::vector<double> min_;
  std::vector<double> max_;
  std::vector<double> median_;
  std::vector<std::size_t> kept_;
  std::vector<std::uint8_t> kept_flag_;
};

struct PreprocessedFeatures {
  FeatureTransform transform;
  // fit_rows x num_features; columns of dropped features are 0.
  Matrix<double> scaled;
};

// Throws Error("no informative features") when every feature is constant on
// the fit rows.
PreprocessedFeatures preprocess_features(const Scenario& scenario,
                                         std::span<const InstanceIndex> fit_rows);

}  // namespace sunny
