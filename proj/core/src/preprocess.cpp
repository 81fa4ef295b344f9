#include "sunny/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sunny/error.hpp"

namespace sunny {

FeatureTransform::FeatureTransform(std::vector<double> min, std::vector<double> max, std::vector<double> median)
    : min_(std::move(min)), max_(std::move(max)), median_(std::move(median)) {
  if (min_.size() != max_.size() || min_.size() != median_.size()) {
    throw Error("feature transform vectors differ in length");
  }
  kept_flag_.assign(min_.size(), 0);
  for (std::size_t f = 0; f < min_.size(); ++f) {
    if (min_[f] < max_[f]) {
      kept_.push_back(f);
      kept_flag_[f] = 1;
    }
  }
}

double FeatureTransform::scale(std::size_t feature, double raw) const {
  if (!kept_flag_[feature]) return 0.0;
  const double x = std::isnan(raw) ? median_[feature] : raw;
  return 2.0 * (x - min_[feature]) / (max_[feature] - min_[feature]) - 1.0;
}

std::vector<double> FeatureTransform::apply(std::span<const double> raw) const {
  std::vector<double> out(num_features());
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = scale(f, raw[f]);
  return out;
}

std::vector<double> FeatureTransform::apply(std::span<const double> raw,
                                            std::span<const std::size_t> selected) const {
  std::vector<double> out;
  out.reserve(selected.size());
  for (auto f : selected) out.push_back(scale(f, raw[f]));
  return out;
}

PreprocessedFeatures preprocess_features(const Scenario& scenario, std::span<const InstanceIndex> fit_rows) {
  if (fit_rows.empty()) throw Error("preprocess_features needs at least one fit row");
  const std::size_t nf = scenario.num_features();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> lo(nf, nan), hi(nf, nan), med(nf, nan);
  std::vector<double> values;
  for (std::size_t f = 0; f < nf; ++f) {
    values.clear();
    for (auto i : fit_rows) {
      const double x = scenario.features(i)[f];
      if (!std::isnan(x)) values.push_back(x);
    }
    if (values.empty()) continue;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    med[f] = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    lo[f] = values.front();
    hi[f] = values.back();
  }

  PreprocessedFeatures out{FeatureTransform(std::move(lo), std::move(hi), std::move(med)), {}};
  if (out.transform.kept_feature_indices().empty()) throw Error("no informative features");
  out.scaled = Matrix<double>(fit_rows.size(), nf);
  for (std::size_t r = 0; r < fit_rows.size(); ++r) {
    const auto raw = scenario.features(fit_rows[r]);
    for (std::size_t f = 0; f < nf; ++f) out.scaled(r, f) = out.transform.scale(f, raw[f]);
  }
  return out;
}

}  // namespace sunny
