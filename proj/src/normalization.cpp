#include "aeroforecast/normalization.hpp"

namespace aero {

NormalizationStats::NormalizationStats(std::vector<FeatureStats> features,
                                       std::size_t target_index)
    : features_(std::move(features)), target_index_(target_index) {
  if (features_.empty()) {
    throw ValidationError("normalization stats need at least one feature");
  }
  if (target_index_ >= features_.size()) {
    throw ValidationError("normalization target index out of range");
  }
  for (const FeatureStats& f : features_) {
    if (!(f.max > f.min)) {
      throw ValidationError("degenerate stats for feature '" + f.name +
                            "': max (" + std::to_string(f.max) +
                            ") must exceed min (" + std::to_string(f.min) + ")");
    }
  }
}

void NormalizationStats::require_fitted() const {
  if (!fitted()) throw ProtocolError("normalization stats used before fitting");
}

const FeatureStats& NormalizationStats::feature(std::size_t i) const {
  require_fitted();
  if (i >= features_.size()) {
    throw DimensionError("feature index " + std::to_string(i) +
                         " out of range (have " + std::to_string(features_.size()) + ")");
  }
  return features_[i];
}

const FeatureStats& NormalizationStats::target() const {
  require_fitted();
  return features_[target_index_];
}

double NormalizationStats::apply(std::size_t feature_idx, double x) const {
  const FeatureStats& f = feature(feature_idx);
  return (x - f.min) / (f.max - f.min);
}

double NormalizationStats::invert(std::size_t feature_idx, double x) const {
  const FeatureStats& f = feature(feature_idx);
  return x * (f.max - f.min) + f.min;
}

std::vector<double> NormalizationStats::apply_row(std::span<const double> row) const {
  require_fitted();
  if (row.size() != features_.size()) {
    throw DimensionError("feature row length " + std::to_string(row.size()) +
                         " does not match stats (" + std::to_string(features_.size()) + ")");
  }
  std::vector<double> out(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) out[i] = apply(i, row[i]);
  return out;
}

}  // namespace aero
