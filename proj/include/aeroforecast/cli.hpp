#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "aeroforecast/data_pipeline.hpp"
#include "aeroforecast/evaluation.hpp"
#include "aeroforecast/model.hpp"
#include "aeroforecast/training.hpp"

namespace aero {

// Everything a run can configure, merged from defaults, the optional config
// file and command-line flags. Validated before any stage executes.
struct RunConfig {
  std::size_t lookback = 8;
  SplitRatios split;
  AggregateOptions aggregate;
  double bin_width = 25.0;
  ModelConfig model;        // feature_count filled in from the data
  TrainConfig train;        // train.seed doubles as the weight-init seed
  std::size_t predict_last = 1;

  void validate() const;
};

struct PreprocessSummary {
  std::size_t rows_read = 0;
  std::size_t rows_rejected = 0;
  std::size_t rows_dropped_missing = 0;
  std::size_t duplicates_removed = 0;
  std::size_t windows_kept = 0;
  std::size_t windows_dropped = 0;
};

std::string preprocess_report_text(const PreprocessSummary& s);

// parse -> clean -> aggregate -> derive; writes the window CSV.
PreprocessSummary run_preprocess(const std::filesystem::path& raw_csv,
                                 const std::filesystem::path& out_windows_csv,
                                 const RunConfig& cfg);

struct TrainSummary {
  TrainReport report;
  std::size_t feature_count = 0;
  std::size_t train_samples = 0;
  std::size_t val_samples = 0;
  std::size_t test_samples = 0;
};

std::string train_summary_text(const TrainSummary& s);

// read windows -> prepare datasets -> build -> train; writes the model file
// and the per-epoch loss CSV.
TrainSummary run_train(const std::filesystem::path& windows_csv,
                       const std::filesystem::path& model_out,
                       const std::filesystem::path& loss_csv_out, const RunConfig& cfg);

struct EvaluateSummary {
  EvalResult physical;        // ug/m3, on the test split
  double normalized_mse = 0.0;
  double normalized_rmse = 0.0;
  double baseline_rmse = 0.0;  // persistence, ug/m3
  std::size_t n = 0;
};

std::string metrics_text(const EvaluateSummary& s);

// read windows + model -> rebuild the test split -> metrics, baseline and the
// forecast/metrics/histogram files under report_dir.
EvaluateSummary run_evaluate(const std::filesystem::path& windows_csv,
                             const std::filesystem::path& model_in,
                             const std::filesystem::path& report_dir,
                             const RunConfig& cfg);

// Predictions for the most recent `predict_last` lookback blocks, physical
// units; the final entry forecasts the not-yet-observed next window.
std::vector<std::pair<std::int64_t, double>> run_predict(
    const std::filesystem::path& model_in, const std::filesystem::path& windows_csv,
    std::size_t n_last);

std::string predictions_text(const std::vector<std::pair<std::int64_t, double>>& preds);

}  // namespace aero
