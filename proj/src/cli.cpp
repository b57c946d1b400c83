#include "aeroforecast/cli.hpp"

#include <sstream>

#include "aeroforecast/calendar.hpp"
#include "aeroforecast/io_util.hpp"
#include "aeroforecast/log.hpp"
#include "aeroforecast/serialize.hpp"

namespace aero {

void RunConfig::validate() const {
  if (lookback == 0) throw ValidationError("lookback must be at least 1");
  split.validate();
  if (aggregate.coverage_threshold < 1 || aggregate.coverage_threshold > 6) {
    throw ValidationError("coverage threshold must be between 1 and 6");
  }
  if (aggregate.weather_topk < 0) {
    throw ValidationError("weather top-k must be non-negative");
  }
  if (!(bin_width > 0.0)) throw ValidationError("histogram bin width must be positive");
  if (predict_last == 0) throw ValidationError("predict count must be at least 1");
  train.validate();
  // model dims are validated at build time, when feature_count is known; the
  // length algebra cannot wait that long or a bad flag set would train first
  ModelConfig probe = model;
  probe.lookback = lookback;
  probe.feature_count = 1;
  probe.validate();
}

std::string preprocess_report_text(const PreprocessSummary& s) {
  std::ostringstream out;
  out << "rows read:            " << s.rows_read << '\n'
      << "rows rejected:        " << s.rows_rejected << '\n'
      << "rows dropped missing: " << s.rows_dropped_missing << '\n'
      << "duplicates removed:   " << s.duplicates_removed << '\n'
      << "windows kept:         " << s.windows_kept << '\n'
      << "windows dropped:      " << s.windows_dropped << '\n';
  return out.str();
}

PreprocessSummary run_preprocess(const std::filesystem::path& raw_csv,
                                 const std::filesystem::path& out_windows_csv,
                                 const RunConfig& cfg) {
  cfg.validate();

  RawDataset raw = parse_csv(raw_csv);
  log_info("parsed " + std::to_string(raw.report.rows_read) + " rows from '" +
           raw_csv.string() + "'");
  for (const auto& [line, reason] : raw.report.rejects) {
    log_debug("rejected line " + std::to_string(line) + ": " + reason);
  }

  CleanResult cleaned = clean(raw.records, raw.columns);
  AggregateResult agg = aggregate_windows(cleaned.records, raw.columns, cfg.aggregate);
  WindowSet windows = derive_features(agg.set);
  write_windows_csv(windows, out_windows_csv);
  log_info("wrote " + std::to_string(windows.windows.size()) + " windows to '" +
           out_windows_csv.string() + "'");

  PreprocessSummary s;
  s.rows_read = raw.report.rows_read;
  s.rows_rejected = raw.report.rows_rejected;
  s.rows_dropped_missing = cleaned.dropped_missing;
  s.duplicates_removed = cleaned.duplicates_removed;
  s.windows_kept = windows.windows.size();
  s.windows_dropped = agg.windows_dropped;
  return s;
}

std::string train_summary_text(const TrainSummary& s) {
  std::ostringstream out;
  out << "features:     " << s.feature_count << '\n'
      << "samples:      " << s.train_samples << " train / " << s.val_samples
      << " val / " << s.test_samples << " test\n"
      << "epochs:       " << s.report.epochs.size() << '\n';
  if (!s.report.epochs.empty()) {
    out << "final train:  " << format_double(s.report.epochs.back().train_loss) << '\n'
        << "final val:    " << format_double(s.report.epochs.back().val_loss) << '\n';
  }
  out << "params crc32: " << s.report.final_params_crc << '\n';
  return out.str();
}

TrainSummary run_train(const std::filesystem::path& windows_csv,
                       const std::filesystem::path& model_out,
                       const std::filesystem::path& loss_csv_out, const RunConfig& cfg) {
  cfg.validate();

  WindowSet windows = read_windows_csv(windows_csv);
  PreparedData data = prepare_datasets(windows, cfg.lookback, cfg.split);
  log_info("prepared " + std::to_string(data.train.size()) + "/" +
           std::to_string(data.val.size()) + "/" + std::to_string(data.test.size()) +
           " train/val/test samples");

  ModelConfig mc = cfg.model;
  mc.lookback = cfg.lookback;
  mc.feature_count = windows.feature_names.size();
  Model model = build_model(mc, data.stats, cfg.train.seed);
  log_info("built model with " + std::to_string(model.parameter_count()) + " parameters");

  TrainSummary s;
  s.report = train(model, data.train, data.val, cfg.train);
  s.feature_count = mc.feature_count;
  s.train_samples = data.train.size();
  s.val_samples = data.val.size();
  s.test_samples = data.test.size();

  save_model(model, model_out);
  export_loss_csv(s.report, loss_csv_out);
  log_info("wrote model to '" + model_out.string() + "'");
  return s;
}

std::string metrics_text(const EvaluateSummary& s) {
  std::ostringstream out;
  out << "n:                   " << s.n << '\n'
      << "mse_ug_m3_sq:        " << format_double(s.physical.mse) << '\n'
      << "rmse_ug_m3:          " << format_double(s.physical.rmse) << '\n'
      << "baseline_rmse_ug_m3: " << format_double(s.baseline_rmse) << '\n'
      << "normalized_mse:      " << format_double(s.normalized_mse) << '\n'
      << "normalized_rmse:     " << format_double(s.normalized_rmse) << '\n';
  return out.str();
}

EvaluateSummary run_evaluate(const std::filesystem::path& windows_csv,
                             const std::filesystem::path& model_in,
                             const std::filesystem::path& report_dir,
                             const RunConfig& cfg) {
  cfg.validate();

  Model model = load_model(model_in);
  WindowSet windows = read_windows_csv(windows_csv);
  if (windows.feature_names.size() != model.config().feature_count) {
    throw ValidationError("window file has " +
                          std::to_string(windows.feature_names.size()) +
                          " features but the model expects " +
                          std::to_string(model.config().feature_count));
  }

  // The split must mirror training: same ratios over the same sample list,
  // normalized with the stats persisted in the model file.
  SampleSet all = make_samples(windows, model.config().lookback, model.stats());
  auto parts = chronological_split(all, cfg.split);
  const SampleSet& test = parts[2];
  if (test.size() == 0) throw ValidationError("test split is empty");

  std::vector<double> preds_norm, preds_phys;
  preds_norm.reserve(test.size());
  for (const Tensor& x : test.inputs) {
    double y = model.forward(x);
    preds_norm.push_back(y);
    preds_phys.push_back(rescale(y, model.stats().target()));
  }

  EvaluateSummary s;
  s.physical = compute_metrics(preds_phys, test.targets_physical, test.timestamps);
  EvalResult norm = compute_metrics(preds_norm, test.targets);
  s.normalized_mse = norm.mse;
  s.normalized_rmse = norm.rmse;
  s.n = test.size();

  EvalResult baseline =
      compute_metrics(persistence_baseline(test), test.targets_physical, test.timestamps);
  s.baseline_rmse = baseline.rmse;

  std::filesystem::create_directories(report_dir);
  export_forecast_csv(s.physical, report_dir / "forecast.csv");
  write_file(report_dir / "metrics.txt", metrics_text(s));

  std::vector<double> pm25_values;
  pm25_values.reserve(windows.windows.size());
  for (const WindowRecord& w : windows.windows) pm25_values.push_back(w.pm25_mean);
  export_histogram_csv(pm25_values, cfg.bin_width, report_dir / "histogram.csv");

  log_info("evaluated " + std::to_string(s.n) + " test samples, rmse " +
           format_double(s.physical.rmse));
  return s;
}

std::vector<std::pair<std::int64_t, double>> run_predict(
    const std::filesystem::path& model_in, const std::filesystem::path& windows_csv,
    std::size_t n_last) {
  if (n_last == 0) throw ValidationError("predict count must be at least 1");

  Model model = load_model(model_in);
  WindowSet windows = read_windows_csv(windows_csv);
  if (windows.feature_names.size() != model.config().feature_count) {
    throw ValidationError("window file has " +
                          std::to_string(windows.feature_names.size()) +
                          " features but the model expects " +
                          std::to_string(model.config().feature_count));
  }

  std::size_t lookback = model.config().lookback;
  const auto& w = windows.windows;
  if (w.size() < lookback) {
    throw ValidationError("need at least " + std::to_string(lookback) +
                          " contiguous windows to predict, have " +
                          std::to_string(w.size()));
  }

  // every contiguous block of `lookback` windows, identified by its end index
  std::vector<std::size_t> block_ends;
  for (std::size_t end = lookback - 1; end < w.size(); ++end) {
    bool contiguous = true;
    for (std::size_t j = 0; j < lookback - 1 && contiguous; ++j) {
      std::size_t i = end - lookback + 1 + j;
      contiguous = w[i + 1].start_hour == w[i].start_hour + 6;
    }
    if (contiguous) block_ends.push_back(end);
  }
  if (block_ends.empty()) {
    throw ValidationError("no contiguous block of " + std::to_string(lookback) +
                          " windows found");
  }
  if (block_ends.size() > n_last) {
    block_ends.erase(block_ends.begin(), block_ends.end() - static_cast<long>(n_last));
  }

  std::vector<std::pair<std::int64_t, double>> preds;
  std::size_t n_features = windows.feature_names.size();
  for (std::size_t end : block_ends) {
    Tensor input({lookback, n_features});
    for (std::size_t j = 0; j < lookback; ++j) {
      const WindowRecord& win = w[end - lookback + 1 + j];
      for (std::size_t f = 0; f < n_features; ++f) {
        input(j, f) = model.stats().apply(f, win.features[f]);
      }
    }
    preds.emplace_back(w[end].start_hour + 6, model.predict_physical(input));
  }
  return preds;
}

std::string predictions_text(const std::vector<std::pair<std::int64_t, double>>& preds) {
  std::ostringstream out;
  out << "timestamp,predicted_pm25_ugm3\n";
  for (const auto& [ts, value] : preds) {
    out << iso8601(ts) << ',' << format_double(value) << '\n';
  }
  return out.str();
}

}  // namespace aero
