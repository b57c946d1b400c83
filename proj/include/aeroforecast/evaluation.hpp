#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aeroforecast/data_pipeline.hpp"
#include "aeroforecast/training.hpp"

namespace aero {

struct EvalPoint {
  std::int64_t timestamp = 0;  // hours; exported as ISO-8601
  double truth = 0.0;
  double pred = 0.0;
};

struct EvalResult {
  double mse = 0.0;   // (ug/m3)^2 when fed physical values
  double rmse = 0.0;  // always sqrt(mse)
  std::size_t n = 0;
  std::vector<EvalPoint> series;
};

// Mean squared error and its square root over parallel series; the per-sample
// series is retained for export. Timestamps are optional (indices are used
// when omitted). Mismatched or empty inputs throw ValidationError.
EvalResult compute_metrics(std::span<const double> preds, std::span<const double> truths,
                           std::span<const std::int64_t> timestamps = {});

// Repeats the physical pm25 mean of each sample's last lookback window.
std::vector<double> persistence_baseline(const SampleSet& samples);

// timestamp,truth_ugm3,pred_ugm3
void export_forecast_csv(const EvalResult& result, const std::filesystem::path& path);

// epoch,train_loss,val_loss with one row per epoch, starting at epoch 1.
void export_loss_csv(const TrainReport& report, const std::filesystem::path& path);

struct HistogramBin {
  double start = 0.0;
  double end = 0.0;
  std::size_t count = 0;
};

// Fixed-width bins starting at 0; negative values land in the first bin and
// everything from the last edge up is counted in the final bin. Non-finite
// values are skipped, so counts sum to the number of finite inputs.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width);

// bin_start,bin_end,count
void export_histogram_csv(std::span<const double> values, double bin_width,
                          const std::filesystem::path& path);

}  // namespace aero
