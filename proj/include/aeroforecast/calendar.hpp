#pragma once

#include <cstdint>
#include <string>

#include "aeroforecast/errors.hpp"

namespace aero {

struct CivilTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;   // 0..23
};

bool is_leap_year(int year);
int days_in_month(int year, int month);
bool valid_civil(const CivilTime& t);

// Days since 1970-01-01 (proleptic Gregorian); negative before the epoch.
std::int64_t days_from_civil(int year, int month, int day);

// Hours since 1970-01-01T00:00.
std::int64_t hours_from_civil(const CivilTime& t);
CivilTime civil_from_hours(std::int64_t hours);

// 1-based ordinal day within the year.
int day_of_year(int year, int month, int day);

// "YYYY-MM-DDTHH:00:00"
std::string iso8601(std::int64_t hours);
std::int64_t parse_iso8601_hours(const std::string& text);

// Floor division (round toward negative infinity).
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace aero
