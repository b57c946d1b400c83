#include "aeroforecast/data_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "aeroforecast/io_util.hpp"

namespace aero {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

enum class Column {
  ignore, year, month, day, hour, pm25, dewp, temp, pres, cbwd, iws, snow, rain, weather
};

Column classify_column(std::string_view header) {
  std::string h = to_lower(trim(header));
  if (h == "no") return Column::ignore;
  if (h == "year") return Column::year;
  if (h == "month") return Column::month;
  if (h == "day") return Column::day;
  if (h == "hour") return Column::hour;
  if (h == "pm2.5" || h == "pm25") return Column::pm25;
  if (h == "dewp") return Column::dewp;
  if (h == "temp" || h == "temperature") return Column::temp;
  if (h == "pres") return Column::pres;
  if (h == "cbwd") return Column::cbwd;
  if (h == "iws") return Column::iws;
  if (h == "is") return Column::snow;
  if (h == "ir") return Column::rain;
  if (h == "weather") return Column::weather;
  return Column::ignore;
}

// "NA", empty, NaN and -99 count as missing; anything else must parse.
bool read_numeric(std::string_view cell, std::optional<double>& out, std::string& reason,
                  const char* name) {
  std::string_view t = trim(cell);
  if (t.empty() || to_lower(t) == "na") {
    out = std::nullopt;
    return true;
  }
  std::optional<double> v = parse_double(t);
  if (!v) {
    reason = std::string("unparseable value '") + std::string(t) + "' in column " + name;
    return false;
  }
  if (std::isnan(*v) || *v == -99.0) {
    out = std::nullopt;
    return true;
  }
  if (!std::isfinite(*v)) {
    reason = std::string("non-finite value in column ") + name;
    return false;
  }
  out = *v;
  return true;
}

}  // namespace

RawDataset parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_csv(in);
}

RawDataset parse_csv(std::istream& in) {
  RawDataset ds;

  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("input CSV is empty (no header row)");
  }
  std::vector<std::string> header = split_csv_line(line);
  std::vector<Column> columns(header.size());
  bool has_year = false, has_month = false, has_day = false, has_hour = false,
       has_pm25 = false, has_dewp = false, has_temp = false, has_pres = false,
       has_cbwd = false, has_iws = false;
  for (std::size_t i = 0; i < header.size(); ++i) {
    columns[i] = classify_column(header[i]);
    switch (columns[i]) {
      case Column::year: has_year = true; break;
      case Column::month: has_month = true; break;
      case Column::day: has_day = true; break;
      case Column::hour: has_hour = true; break;
      case Column::pm25: has_pm25 = true; break;
      case Column::dewp: has_dewp = true; break;
      case Column::temp: has_temp = true; break;
      case Column::pres: has_pres = true; break;
      case Column::cbwd: has_cbwd = true; break;
      case Column::iws: has_iws = true; break;
      case Column::snow: ds.columns.has_snow = true; break;
      case Column::rain: ds.columns.has_rain = true; break;
      case Column::weather: ds.columns.has_weather = true; break;
      case Column::ignore: break;
    }
  }
  std::string missing;
  auto need = [&missing](bool present, const char* name) {
    if (!present) {
      if (!missing.empty()) missing += ", ";
      missing += name;
    }
  };
  need(has_year, "year");
  need(has_month, "month");
  need(has_day, "day");
  need(has_hour, "hour");
  need(has_pm25, "pm2.5");
  need(has_dewp, "DEWP");
  need(has_temp, "TEMP");
  need(has_pres, "PRES");
  need(has_cbwd, "cbwd");
  need(has_iws, "Iws");
  if (!missing.empty()) {
    throw ValidationError("input CSV is missing required columns: " + missing);
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++ds.report.rows_read;

    std::vector<std::string> cells = split_csv_line(line);
    auto reject = [&](const std::string& reason) {
      ++ds.report.rows_rejected;
      ds.report.rejects.emplace_back(line_no, reason);
    };
    if (cells.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " columns, got " +
             std::to_string(cells.size()));
      continue;
    }

    RawRecord rec;
    std::string reason;
    bool ok = true;
    for (std::size_t i = 0; i < cells.size() && ok; ++i) {
      switch (columns[i]) {
        case Column::ignore:
          break;
        case Column::year:
        case Column::month:
        case Column::day:
        case Column::hour: {
          std::optional<long> v = parse_int(cells[i]);
          if (!v) {
            reason = "bad integer '" + std::string(trim(cells[i])) + "' in calendar column";
            ok = false;
            break;
          }
          int iv = static_cast<int>(*v);
          if (columns[i] == Column::year) rec.time.year = iv;
          else if (columns[i] == Column::month) rec.time.month = iv;
          else if (columns[i] == Column::day) rec.time.day = iv;
          else rec.time.hour = iv;
          break;
        }
        case Column::pm25: ok = read_numeric(cells[i], rec.pm25, reason, "pm2.5"); break;
        case Column::dewp: ok = read_numeric(cells[i], rec.dewp, reason, "DEWP"); break;
        case Column::temp: ok = read_numeric(cells[i], rec.temp, reason, "TEMP"); break;
        case Column::pres: ok = read_numeric(cells[i], rec.pres, reason, "PRES"); break;
        case Column::iws: ok = read_numeric(cells[i], rec.iws, reason, "Iws"); break;
        case Column::snow: ok = read_numeric(cells[i], rec.snow_hours, reason, "Is"); break;
        case Column::rain: ok = read_numeric(cells[i], rec.rain_hours, reason, "Ir"); break;
        case Column::cbwd: rec.wind = std::string(trim(cells[i])); break;
        case Column::weather: rec.weather = std::string(trim(cells[i])); break;
      }
    }
    if (!ok) {
      reject(reason);
      continue;
    }
    if (!valid_civil(rec.time)) {
      reject("invalid timestamp " + std::to_string(rec.time.year) + "-" +
             std::to_string(rec.time.month) + "-" + std::to_string(rec.time.day) +
             " hour " + std::to_string(rec.time.hour));
      continue;
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

CleanResult clean(const std::vector<RawRecord>& records, const ColumnSet& columns) {
  CleanResult result;
  result.records.reserve(records.size());
  for (const RawRecord& r : records) {
    bool complete = r.pm25 && r.dewp && r.temp && r.pres && r.iws && !r.wind.empty();
    if (columns.has_snow && !r.snow_hours) complete = false;
    if (columns.has_rain && !r.rain_hours) complete = false;
    if (!complete) {
      ++result.dropped_missing;
      continue;
    }
    result.records.push_back(r);
  }

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const RawRecord& a, const RawRecord& b) {
                     return a.hours() < b.hours();
                   });

  std::vector<RawRecord> unique;
  unique.reserve(result.records.size());
  for (RawRecord& r : result.records) {
    if (!unique.empty() && unique.back().hours() == r.hours()) {
      ++result.duplicates_removed;
      continue;
    }
    unique.push_back(std::move(r));
  }
  result.records = std::move(unique);
  return result;
}

std::array<double, 4> encode_wind(std::string_view token) {
  std::string t = to_lower(trim(token));
  for (std::size_t i = 0; i < kWindTokens.size(); ++i) {
    if (t == to_lower(kWindTokens[i])) {
      std::array<double, 4> one_hot{};
      one_hot[i] = 1.0;
      return one_hot;
    }
  }
  throw ValidationError("unknown wind direction token '" + std::string(token) + "'");
}

AggregateResult aggregate_windows(const std::vector<RawRecord>& records,
                                  const ColumnSet& columns,
                                  const AggregateOptions& options) {
  if (options.coverage_threshold < 1 || options.coverage_threshold > 6) {
    throw ValidationError("coverage threshold must be between 1 and 6");
  }

  // top-k weather vocabulary, ranked by frequency then token
  std::vector<std::string> weather_vocab;
  if (columns.has_weather && options.weather_topk > 0) {
    std::map<std::string, std::size_t> counts;
    for (const RawRecord& r : records) {
      if (!r.weather.empty()) ++counts[r.weather];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (std::size_t i = 0; i < ranked.size() &&
         i < static_cast<std::size_t>(options.weather_topk); ++i) {
      weather_vocab.push_back(ranked[i].first);
    }
  }

  AggregateResult result;
  WindowSet& set = result.set;
  set.feature_names = {"pm25_mean", "dewp", "temp", "pres", "iws"};
  if (columns.has_snow) set.feature_names.push_back("snow_hours");
  if (columns.has_rain) set.feature_names.push_back("rain_hours");
  set.feature_names.insert(set.feature_names.end(),
                           {"wind_ne", "wind_nw", "wind_se", "wind_cv"});
  for (const std::string& tok : weather_vocab) {
    set.feature_names.push_back("weather_" + to_lower(tok));
  }

  std::size_t i = 0;
  while (i < records.size()) {
    std::int64_t window_id = floor_div(records[i].hours(), 6);
    std::size_t j = i;
    while (j < records.size() && floor_div(records[j].hours(), 6) == window_id) ++j;

    int valid = static_cast<int>(j - i);
    if (valid < options.coverage_threshold) {
      ++result.windows_dropped;
      i = j;
      continue;
    }

    WindowRecord w;
    w.start_hour = window_id * 6;
    w.valid_hours = valid;
    double inv = 1.0 / static_cast<double>(valid);

    double pm25 = 0, dewp = 0, temp = 0, pres = 0, iws = 0, snow = 0, rain = 0;
    std::array<double, 4> wind{};
    std::vector<double> weather(weather_vocab.size(), 0.0);
    for (std::size_t r = i; r < j; ++r) {
      const RawRecord& rec = records[r];
      pm25 += *rec.pm25;
      dewp += *rec.dewp;
      temp += *rec.temp;
      pres += *rec.pres;
      iws += *rec.iws;
      if (columns.has_snow) snow += *rec.snow_hours;
      if (columns.has_rain) rain += *rec.rain_hours;
      std::array<double, 4> one_hot = encode_wind(rec.wind);
      for (std::size_t k = 0; k < 4; ++k) wind[k] += one_hot[k];
      for (std::size_t k = 0; k < weather_vocab.size(); ++k) {
        if (rec.weather == weather_vocab[k]) weather[k] += 1.0;
      }
    }

    w.pm25_mean = pm25 * inv;
    w.features.push_back(w.pm25_mean);
    w.features.push_back(dewp * inv);
    w.features.push_back(temp * inv);
    w.features.push_back(pres * inv);
    w.features.push_back(iws * inv);
    if (columns.has_snow) w.features.push_back(snow * inv);
    if (columns.has_rain) w.features.push_back(rain * inv);
    for (double v : wind) w.features.push_back(v * inv);
    for (double v : weather) w.features.push_back(v * inv);

    set.windows.push_back(std::move(w));
    i = j;
  }
  return result;
}

WindowSet derive_features(const WindowSet& in) {
  WindowSet out = in;
  out.feature_names.insert(out.feature_names.end(),
                           {"hour_sin", "hour_cos", "doy_sin", "doy_cos",
                            "pm25_lag_diff"});
  for (std::size_t i = 0; i < out.windows.size(); ++i) {
    WindowRecord& w = out.windows[i];
    CivilTime t = civil_from_hours(w.start_hour);
    double hour_phase = 2.0 * kPi * static_cast<double>(t.hour) / 24.0;
    double doy = static_cast<double>(day_of_year(t.year, t.month, t.day) - 1) +
                 static_cast<double>(t.hour) / 24.0;
    double doy_phase = 2.0 * kPi * doy / 365.25;
    double lag = i > 0 ? w.pm25_mean - out.windows[i - 1].pm25_mean : 0.0;
    w.features.push_back(std::sin(hour_phase));
    w.features.push_back(std::cos(hour_phase));
    w.features.push_back(std::sin(doy_phase));
    w.features.push_back(std::cos(doy_phase));
    w.features.push_back(lag);
  }
  return out;
}

NormalizationStats fit_normalizer(const WindowSet& set, std::size_t window_count) {
  if (window_count == 0 || set.windows.empty()) {
    throw ValidationError("cannot fit normalizer on zero windows");
  }
  if (window_count > set.windows.size()) {
    throw ValidationError("normalizer window count exceeds available windows");
  }
  std::size_t n_features = set.feature_names.size();
  std::vector<FeatureStats> stats(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    stats[f].name = set.feature_names[f];
    stats[f].min = set.windows[0].features[f];
    stats[f].max = set.windows[0].features[f];
  }
  for (std::size_t i = 0; i < window_count; ++i) {
    const WindowRecord& w = set.windows[i];
    if (w.features.size() != n_features) {
      throw DimensionError("window feature length mismatch at window " + std::to_string(i));
    }
    for (std::size_t f = 0; f < n_features; ++f) {
      stats[f].min = std::min(stats[f].min, w.features[f]);
      stats[f].max = std::max(stats[f].max, w.features[f]);
    }
  }
  for (const FeatureStats& s : stats) {
    if (!(s.max > s.min)) {
      throw ValidationError("degenerate feature '" + s.name +
                            "': constant value " + format_double(s.min) +
                            " across the fitted windows");
    }
  }

  auto target = std::find(set.feature_names.begin(), set.feature_names.end(), "pm25_mean");
  if (target == set.feature_names.end()) {
    throw ValidationError("window set has no pm25_mean feature");
  }
  return NormalizationStats(std::move(stats),
                            static_cast<std::size_t>(target - set.feature_names.begin()));
}

std::vector<std::pair<std::size_t, std::size_t>> sample_ranges(const WindowSet& set,
                                                               std::size_t lookback) {
  if (lookback == 0) throw ValidationError("lookback must be at least 1");
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  const auto& w = set.windows;
  if (w.size() < lookback + 1) return ranges;
  for (std::size_t i = 0; i + lookback < w.size(); ++i) {
    bool contiguous = true;
    for (std::size_t j = 0; j < lookback && contiguous; ++j) {
      contiguous = w[i + j + 1].start_hour == w[i + j].start_hour + 6;
    }
    if (contiguous) ranges.emplace_back(i, i + lookback);
  }
  return ranges;
}

SampleSet make_samples(const WindowSet& set, std::size_t lookback,
                       const NormalizationStats& stats) {
  if (!stats.fitted()) throw ProtocolError("make_samples requires fitted stats");
  if (stats.feature_count() != set.feature_names.size()) {
    throw DimensionError("stats cover " + std::to_string(stats.feature_count()) +
                         " features but windows have " +
                         std::to_string(set.feature_names.size()));
  }

  SampleSet samples;
  for (auto [first, target] : sample_ranges(set, lookback)) {
    std::size_t n_features = set.feature_names.size();
    Tensor input({lookback, n_features});
    for (std::size_t j = 0; j < lookback; ++j) {
      const WindowRecord& w = set.windows[first + j];
      for (std::size_t f = 0; f < n_features; ++f) {
        input(j, f) = stats.apply(f, w.features[f]);
      }
    }
    const WindowRecord& t = set.windows[target];
    samples.inputs.push_back(std::move(input));
    samples.targets.push_back(stats.apply(stats.target_index(), t.pm25_mean));
    samples.timestamps.push_back(t.start_hour);
    samples.targets_physical.push_back(t.pm25_mean);
    samples.last_window_pm25.push_back(set.windows[target - 1].pm25_mean);
  }
  return samples;
}

void SplitRatios::validate() const {
  if (!(train > 0.0) || val < 0.0 || test < 0.0) {
    throw ValidationError("split ratios must be positive (train) and non-negative");
  }
  double total = train + val + test;
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1, got " + format_double(total));
  }
}

namespace {

SampleSet slice_samples(const SampleSet& s, std::size_t begin, std::size_t end,
                        SplitTag tag) {
  SampleSet out;
  out.tag = tag;
  for (std::size_t i = begin; i < end; ++i) {
    out.inputs.push_back(s.inputs[i]);
    out.targets.push_back(s.targets[i]);
    out.timestamps.push_back(s.timestamps[i]);
    out.targets_physical.push_back(s.targets_physical[i]);
    out.last_window_pm25.push_back(s.last_window_pm25[i]);
  }
  return out;
}

}  // namespace

std::array<SampleSet, 3> chronological_split(const SampleSet& samples,
                                             const SplitRatios& ratios) {
  ratios.validate();
  std::size_t n = samples.size();
  if (n < 3) {
    throw ValidationError("too few samples to split: " + std::to_string(n));
  }
  std::size_t n_train = static_cast<std::size_t>(ratios.train * static_cast<double>(n));
  std::size_t n_val = static_cast<std::size_t>(ratios.val * static_cast<double>(n));
  return {slice_samples(samples, 0, n_train, SplitTag::train),
          slice_samples(samples, n_train, n_train + n_val, SplitTag::val),
          slice_samples(samples, n_train + n_val, n, SplitTag::test)};
}

PreparedData prepare_datasets(const WindowSet& set, std::size_t lookback,
                              const SplitRatios& ratios) {
  ratios.validate();
  auto ranges = sample_ranges(set, lookback);
  std::size_t n = ranges.size();
  if (n < 3) {
    throw ValidationError("too few samples to split: " + std::to_string(n) +
                          " (need at least 3; " + std::to_string(set.windows.size()) +
                          " windows at lookback " + std::to_string(lookback) + ")");
  }
  std::size_t n_train = static_cast<std::size_t>(ratios.train * static_cast<double>(n));
  if (n_train == 0) {
    throw ValidationError("split leaves no training samples");
  }

  // Fit on every window the training samples touch, inputs and targets alike.
  std::size_t train_window_count = ranges[n_train - 1].second + 1;
  NormalizationStats stats = fit_normalizer(set, train_window_count);

  SampleSet all = make_samples(set, lookback, stats);
  auto parts = chronological_split(all, ratios);
  return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2]), std::move(stats)};
}

void write_windows_csv(const WindowSet& set, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "window_start";
  for (const std::string& name : set.feature_names) out << ',' << name;
  out << ",target_pm25\n";
  for (const WindowRecord& w : set.windows) {
    out << iso8601(w.start_hour);
    for (double f : w.features) out << ',' << format_double(f);
    out << ',' << format_double(w.pm25_mean) << '\n';
  }
  write_file(path, out.str());
}

WindowSet read_windows_csv(const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("window CSV '" + path.string() + "' is empty");
  }
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "window_start" ||
      header.back() != "target_pm25") {
    throw ValidationError("window CSV '" + path.string() +
                          "' must start with window_start and end with target_pm25");
  }

  WindowSet set;
  set.feature_names.assign(header.begin() + 1, header.end() - 1);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("window CSV line " + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) + " columns");
    }
    WindowRecord w;
    w.start_hour = parse_iso8601_hours(cells[0]);
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
      std::optional<double> v = parse_double(cells[i]);
      if (!v || !std::isfinite(*v)) {
        throw ValidationError("window CSV line " + std::to_string(line_no) +
                              ": bad value in column " + header[i]);
      }
      w.features.push_back(*v);
    }
    std::optional<double> target = parse_double(cells.back());
    if (!target || !std::isfinite(*target)) {
      throw ValidationError("window CSV line " + std::to_string(line_no) +
                            ": bad target value");
    }
    w.pm25_mean = *target;
    w.valid_hours = 6;
    set.windows.push_back(std::move(w));
  }
  return set;
}

}  // namespace aero
