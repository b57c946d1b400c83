#include "support/synth.hpp"

#include <cmath>
#include <sstream>

#include "aeroforecast/calendar.hpp"
#include "aeroforecast/io_util.hpp"
#include "aeroforecast/rng.hpp"

namespace aero::synth {

namespace {

constexpr double kTau = 2.0 * 3.141592653589793238462643383279502884;
constexpr const char* kTokens[4] = {"NE", "NW", "SE", "cv"};

std::int64_t start_2014() { return hours_from_civil({2014, 1, 1, 0}); }

void append_row(std::ostringstream& out, const CivilTime& t, const std::string& pm25,
                const std::string& dewp, const std::string& temp,
                const std::string& pres, const char* cbwd, const std::string& iws,
                const std::string& is = "", const std::string& ir = "") {
  out << t.year << ',' << t.month << ',' << t.day << ',' << t.hour << ',' << pm25
      << ',' << dewp << ',' << temp << ',' << pres << ',' << cbwd << ',' << iws;
  if (!is.empty() || !ir.empty()) out << ',' << is << ',' << ir;
  out << '\n';
}

}  // namespace

std::string sine_hourly_csv(std::size_t hours, std::uint64_t seed, double base,
                            double amplitude, double noise_sd) {
  Rng rng(seed);
  std::ostringstream out;
  out << "year,month,day,hour,pm2.5,DEWP,TEMP,PRES,cbwd,Iws\n";
  std::int64_t start = start_2014();
  for (std::size_t t = 0; t < hours; ++t) {
    CivilTime ct = civil_from_hours(start + static_cast<std::int64_t>(t));
    double td = static_cast<double>(t);
    double pm25 = base + amplitude * std::sin(kTau * td / 24.0) + rng.normal(0.0, noise_sd);
    double temp = 12.0 + 8.0 * std::sin(kTau * (td - 3.0) / 24.0) + rng.normal(0.0, 1.0);
    double dewp = temp - 6.0 + rng.normal(0.0, 1.5);
    double pres = 1015.0 + 6.0 * std::sin(kTau * td / 144.0) + rng.normal(0.0, 2.0);
    double iws = 1.0 + std::abs(rng.normal(0.0, 6.0));
    const char* cbwd = kTokens[rng.integer(4)];
    append_row(out, ct, format_double(pm25), format_double(dewp), format_double(temp),
               format_double(pres), cbwd, format_double(iws));
  }
  return out.str();
}

std::string fixture_hourly_csv(std::size_t hours, std::uint64_t seed,
                               const FixtureOptions& options) {
  Rng rng(seed);
  std::ostringstream out;
  out << "No,year,month,day,hour,pm2.5,DEWP,TEMP,PRES,cbwd,Iws,Is,Ir\n";

  std::int64_t start = start_2014();
  double ar_noise = 0.0;
  int wind_state = 0;
  int snow_run = 0, rain_run = 0;

  for (std::size_t t = 0; t < hours; ++t) {
    CivilTime ct = civil_from_hours(start + static_cast<std::int64_t>(t));
    double td = static_cast<double>(t);
    double doy = static_cast<double>(day_of_year(ct.year, ct.month, ct.day));

    if (rng.uniform() > 0.70) wind_state = static_cast<int>(rng.integer(4));
    const char* cbwd = kTokens[wind_state];
    static const double wind_shift[4] = {0.0, -20.0, 5.0, 12.0};  // NE, NW, SE, cv

    ar_noise = 0.8 * ar_noise + rng.normal(0.0, 4.0);
    double pm25 = 75.0 + 30.0 * std::sin(kTau * (td - 4.0) / 24.0) +
                  40.0 * std::sin(kTau * td / (24.0 * 5.3) + 0.7) +
                  20.0 * std::cos(kTau * doy / 365.0) + wind_shift[wind_state] + ar_noise;
    pm25 = std::max(pm25, 2.0);

    double temp = 10.0 + 12.0 * std::sin(kTau * (doy - 100.0) / 365.0) +
                  7.0 * std::sin(kTau * (td - 5.0) / 24.0) + rng.normal(0.0, 1.2);
    double dewp = temp - 8.0 + 3.0 * std::sin(kTau * td / 96.0) + rng.normal(0.0, 1.5);
    double pres = 1012.0 + 8.0 * std::sin(kTau * td / (24.0 * 5.3) + 1.3) +
                  rng.normal(0.0, 2.0);
    double iws = std::abs(rng.normal(2.0, 4.0)) + (wind_state == 1 ? 6.0 : 0.0);

    if (snow_run > 0) {
      --snow_run;
    } else if (doy < 60.0 && rng.uniform() < 0.02) {
      snow_run = 3 + static_cast<int>(rng.integer(8));
    }
    if (rain_run > 0) {
      --rain_run;
    } else if (rng.uniform() < (doy >= 60.0 ? 0.015 : 0.006)) {
      rain_run = 2 + static_cast<int>(rng.integer(10));
    }
    double is_hours = snow_run > 0 ? static_cast<double>(snow_run) : 0.0;
    double ir_hours = rain_run > 0 ? static_cast<double>(rain_run) : 0.0;

    std::string pm25_s = format_double(pm25);
    std::string dewp_s = format_double(dewp);
    if (options.na_fraction > 0.0) {
      if (rng.uniform() < options.na_fraction) pm25_s = "NA";
      if (rng.uniform() < options.na_fraction * 0.4) dewp_s = "-99";
    }

    out << (t + 1) << ',';
    append_row(out, ct, pm25_s, dewp_s, format_double(temp), format_double(pres), cbwd,
               format_double(iws), format_double(is_hours), format_double(ir_hours));

    if (options.inject_bad_rows && t == 500) {
      out << "botched,row\n";                                  // wrong column count
      out << (t + 1) << ',';                                   // duplicate timestamp
      append_row(out, ct, format_double(pm25 + 1.0), dewp_s, format_double(temp),
                 format_double(pres), cbwd, format_double(iws),
                 format_double(is_hours), format_double(ir_hours));
      CivilTime bad = ct;
      bad.hour = 25;                                           // calendar bound
      out << (t + 2) << ',';
      append_row(out, bad, pm25_s, dewp_s, format_double(temp), format_double(pres),
                 cbwd, format_double(iws), format_double(is_hours),
                 format_double(ir_hours));
    }
  }
  return out.str();
}

}  // namespace aero::synth
