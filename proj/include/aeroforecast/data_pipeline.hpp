#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "aeroforecast/calendar.hpp"
#include "aeroforecast/normalization.hpp"
#include "aeroforecast/tensor.hpp"

namespace aero {

// ---------------------------------------------------------------------------
// Raw hourly records
// ---------------------------------------------------------------------------

// One hourly observation. Numeric fields are nullopt when the source had
// "NA", an empty cell, NaN or the -99 sentinel.
struct RawRecord {
  CivilTime time;
  std::optional<double> pm25;
  std::optional<double> dewp;
  std::optional<double> temp;
  std::optional<double> pres;
  std::optional<double> iws;
  std::optional<double> snow_hours;  // "Is" column when present
  std::optional<double> rain_hours;  // "Ir" column when present
  std::string wind;                  // cbwd token; empty = missing
  std::string weather;               // free-form token; never forces a drop

  std::int64_t hours() const { return hours_from_civil(time); }
};

// Which optional columns the source file carries.
struct ColumnSet {
  bool has_snow = false;
  bool has_rain = false;
  bool has_weather = false;
};

struct ParseReport {
  std::size_t rows_read = 0;      // data rows seen (header excluded)
  std::size_t rows_rejected = 0;  // structurally bad rows
  std::vector<std::pair<std::size_t, std::string>> rejects;  // (line number, reason)
};

struct RawDataset {
  std::vector<RawRecord> records;
  ColumnSet columns;
  ParseReport report;
};

// Reads the hourly CSV. The header row identifies columns; recognized names
// (case-insensitive): year, month, day, hour, pm2.5/pm25, dewp,
// temp/temperature, pres, cbwd, iws, is, ir, weather, no (ignored index).
// Unrecognized columns are ignored. Rows with the wrong column count, bad
// numerics, or an invalid timestamp are rejected and counted with their line
// number. Missing required columns throw ValidationError; unreadable files
// throw IoError.
RawDataset parse_csv(const std::filesystem::path& path);
RawDataset parse_csv(std::istream& in);

struct CleanResult {
  std::vector<RawRecord> records;       // sorted, deduplicated, fully populated
  std::size_t dropped_missing = 0;      // rows lost to missing/invalid values
  std::size_t duplicates_removed = 0;   // same-timestamp rows collapsed
};

// Drops rows whose pm25 or any other present-column feature is missing, sorts
// chronologically and collapses duplicate timestamps keeping the first.
// Idempotent. The weather column never causes a drop.
CleanResult clean(const std::vector<RawRecord>& records, const ColumnSet& columns);

// Fixed wind one-hot order.
inline constexpr std::array<const char*, 4> kWindTokens = {"NE", "NW", "SE", "cv"};

// One-hot over [NE, NW, SE, cv]; token match is case-insensitive. Unknown
// tokens throw ValidationError naming the token.
std::array<double, 4> encode_wind(std::string_view token);

// ---------------------------------------------------------------------------
// 6-hour windows
// ---------------------------------------------------------------------------

// One aggregated 6-hour row. features follows the name list of the owning
// WindowSet; pm25_mean duplicates features[0] and doubles as the target when
// the following sample points here.
struct WindowRecord {
  std::int64_t start_hour = 0;  // aligned to hours {0, 6, 12, 18}
  std::vector<double> features;
  double pm25_mean = 0.0;
  int valid_hours = 0;
};

struct WindowSet {
  std::vector<std::string> feature_names;
  std::vector<WindowRecord> windows;
};

struct AggregateOptions {
  int coverage_threshold = 4;   // windows with fewer valid hours are dropped
  int weather_topk = 0;         // 0 ignores the weather column entirely
};

struct AggregateResult {
  WindowSet set;
  std::size_t windows_dropped = 0;  // below the coverage threshold
};

// Buckets cleaned records into windows aligned at hours {0, 6, 12, 18}.
// Numeric features and the target are means over the valid hours; the wind
// one-hot averages into occupancy fractions. Base feature order:
// pm25_mean, dewp, temp, pres, iws, [snow_hours, rain_hours],
// wind_ne, wind_nw, wind_se, wind_cv, [weather_<token>...].
AggregateResult aggregate_windows(const std::vector<RawRecord>& records,
                                  const ColumnSet& columns,
                                  const AggregateOptions& options = {});

// Appends hour-of-day and day-of-year phase features (periods 24 h and
// 365.25 d) plus the lag-1 difference of pm25_mean (0 for the first window).
WindowSet derive_features(const WindowSet& in);

// Per-feature min/max over the given windows; the target shares the
// pm25_mean feature's stats. A constant feature throws ValidationError.
NormalizationStats fit_normalizer(const WindowSet& set, std::size_t window_count);
inline NormalizationStats fit_normalizer(const WindowSet& set) {
  return fit_normalizer(set, set.windows.size());
}

// ---------------------------------------------------------------------------
// samples and splits
// ---------------------------------------------------------------------------

enum class SplitTag { train, val, test };

struct SampleSet {
  std::vector<Tensor> inputs;               // each [L, F], normalized
  std::vector<double> targets;              // normalized pm25_mean of the next window
  std::vector<std::int64_t> timestamps;     // start hour of the target window
  std::vector<double> targets_physical;     // same targets in ug/m3
  std::vector<double> last_window_pm25;     // physical pm25_mean of the last input window
  SplitTag tag = SplitTag::train;

  std::size_t size() const { return inputs.size(); }
};

// (first input window index, target window index) for every run of L + 1
// windows whose start hours advance by exactly 6.
std::vector<std::pair<std::size_t, std::size_t>> sample_ranges(const WindowSet& set,
                                                               std::size_t lookback);

// Materializes every valid sample, normalized with `stats`. Windows
// straddling a timestamp gap produce no sample; too few windows yield an
// empty set, not an error.
SampleSet make_samples(const WindowSet& set, std::size_t lookback,
                       const NormalizationStats& stats);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
  void validate() const;
};

// First floor(train*N) samples, next floor(val*N), remainder to test. No
// shuffling; fewer than 3 samples throw ValidationError.
std::array<SampleSet, 3> chronological_split(const SampleSet& samples,
                                             const SplitRatios& ratios);

struct PreparedData {
  SampleSet train;
  SampleSet val;
  SampleSet test;
  NormalizationStats stats;
};

// Leakage-free wiring of the steps above: enumerates samples, fits the
// normalizer on the windows the training split touches (inputs and targets),
// then materializes and splits the normalized samples.
PreparedData prepare_datasets(const WindowSet& set, std::size_t lookback,
                              const SplitRatios& ratios);

// ---------------------------------------------------------------------------
// window CSV
// ---------------------------------------------------------------------------

// Header: window_start,<feature names...>,target_pm25. Timestamps are
// ISO-8601; floats use full round-trippable precision.
void write_windows_csv(const WindowSet& set, const std::filesystem::path& path);
WindowSet read_windows_csv(const std::filesystem::path& path);

}  // namespace aero
