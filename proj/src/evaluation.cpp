#include "aeroforecast/evaluation.hpp"

#include <cmath>
#include <sstream>

#include "aeroforecast/calendar.hpp"
#include "aeroforecast/io_util.hpp"

namespace aero {

EvalResult compute_metrics(std::span<const double> preds, std::span<const double> truths,
                           std::span<const std::int64_t> timestamps) {
  if (preds.size() != truths.size()) {
    throw ValidationError("metrics: " + std::to_string(preds.size()) +
                          " predictions vs " + std::to_string(truths.size()) + " truths");
  }
  if (preds.empty()) throw ValidationError("metrics: empty series");
  if (!timestamps.empty() && timestamps.size() != preds.size()) {
    throw ValidationError("metrics: timestamp count does not match series length");
  }

  EvalResult r;
  r.n = preds.size();
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ensure_finite(preds[i], "compute_metrics pred");
    ensure_finite(truths[i], "compute_metrics truth");
    double d = preds[i] - truths[i];
    total += d * d;
    r.series.push_back({timestamps.empty() ? static_cast<std::int64_t>(i) : timestamps[i],
                        truths[i], preds[i]});
  }
  r.mse = total / static_cast<double>(r.n);
  r.rmse = std::sqrt(r.mse);
  return r;
}

std::vector<double> persistence_baseline(const SampleSet& samples) {
  return samples.last_window_pm25;
}

void export_forecast_csv(const EvalResult& result, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "timestamp,truth_ugm3,pred_ugm3\n";
  for (const EvalPoint& p : result.series) {
    out << iso8601(p.timestamp) << ',' << format_double(p.truth) << ','
        << format_double(p.pred) << '\n';
  }
  write_file(path, out.str());
}

void export_loss_csv(const TrainReport& report, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss\n";
  for (std::size_t i = 0; i < report.epochs.size(); ++i) {
    out << (i + 1) << ',' << format_double(report.epochs[i].train_loss) << ','
        << format_double(report.epochs[i].val_loss) << '\n';
  }
  write_file(path, out.str());
}

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw ValidationError("histogram bin width must be positive");

  std::vector<HistogramBin> bins;
  double max_value = 0.0;
  bool any = false;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    any = true;
    max_value = std::max(max_value, v);
  }
  if (!any) return bins;

  std::size_t n_bins = static_cast<std::size_t>(std::floor(max_value / bin_width)) + 1;
  bins.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    bins[i].start = static_cast<double>(i) * bin_width;
    bins[i].end = static_cast<double>(i + 1) * bin_width;
  }
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    double idx = std::floor(v / bin_width);
    std::size_t i = idx < 0.0 ? 0 : std::min(static_cast<std::size_t>(idx), n_bins - 1);
    ++bins[i].count;
  }
  return bins;
}

void export_histogram_csv(std::span<const double> values, double bin_width,
                          const std::filesystem::path& path) {
  std::ostringstream out;
  out << "bin_start,bin_end,count\n";
  for (const HistogramBin& b : histogram(values, bin_width)) {
    out << format_double(b.start) << ',' << format_double(b.end) << ',' << b.count << '\n';
  }
  write_file(path, out.str());
}

}  // namespace aero
