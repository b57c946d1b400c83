#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aeroforecast/errors.hpp"

namespace aero {

struct FeatureStats {
  std::string name;
  double min = 0.0;
  double max = 0.0;
};

// Per-feature min/max fitted on the training split. Maps each feature onto
// [0, 1] over the fitted range; values outside the range map outside [0, 1]
// and are deliberately not clamped.
class NormalizationStats {
 public:
  NormalizationStats() = default;
  NormalizationStats(std::vector<FeatureStats> features, std::size_t target_index);

  bool fitted() const { return !features_.empty(); }
  std::size_t feature_count() const { return features_.size(); }
  const FeatureStats& feature(std::size_t i) const;
  std::size_t target_index() const { return target_index_; }
  const FeatureStats& target() const;

  // (x - min) / (max - min)
  double apply(std::size_t feature, double x) const;
  // x * (max - min) + min
  double invert(std::size_t feature, double x) const;

  std::vector<double> apply_row(std::span<const double> row) const;

 private:
  void require_fitted() const;
  std::vector<FeatureStats> features_;
  std::size_t target_index_ = 0;
};

}  // namespace aero
