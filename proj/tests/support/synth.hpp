#pragma once

#include <cstdint>
#include <string>

namespace aero::synth {

// Plain sinusoid task: pm25(t) = base + amplitude * sin(2 pi t / 24h) plus
// Gaussian noise, with weakly informative weather covariates. Columns:
// year,month,day,hour,pm2.5,DEWP,TEMP,PRES,cbwd,Iws. Starts 2014-01-01T00.
std::string sine_hourly_csv(std::size_t hours, std::uint64_t seed, double base = 100.0,
                            double amplitude = 50.0, double noise_sd = 5.0);

struct FixtureOptions {
  double na_fraction = 0.012;   // cells replaced by NA / -99
  bool inject_bad_rows = true;  // a few malformed rows and one duplicate
};

// Richer series for end-to-end runs: diurnal and synoptic cycles, seasonal
// drift, wind-regime effects, AR(1) noise, snow/rain episode columns
// (Is / Ir). Same schema as the Beijing hourly export.
std::string fixture_hourly_csv(std::size_t hours, std::uint64_t seed,
                               const FixtureOptions& options = {});

}  // namespace aero::synth
