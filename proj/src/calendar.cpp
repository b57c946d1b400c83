#include "aeroforecast/calendar.hpp"

#include <cstdio>

namespace aero {

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static const int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap_year(year)) return 29;
  return lengths[month - 1];
}

bool valid_civil(const CivilTime& t) {
  if (t.month < 1 || t.month > 12) return false;
  if (t.day < 1 || t.day > days_in_month(t.year, t.month)) return false;
  if (t.hour < 0 || t.hour > 23) return false;
  return true;
}

// Howard Hinnant's days-from-civil algorithm.
std::int64_t days_from_civil(int year, int month, int day) {
  year -= month <= 2;
  const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);              // [0, 399]
  const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;  // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;                // [0, 146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t hours_from_civil(const CivilTime& t) {
  return days_from_civil(t.year, t.month, t.day) * 24 + t.hour;
}

CivilTime civil_from_hours(std::int64_t hours) {
  std::int64_t days = floor_div(hours, 24);
  int hour = static_cast<int>(hours - days * 24);

  // inverse of days_from_civil
  std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);

  CivilTime t;
  t.year = static_cast<int>(y + (m <= 2));
  t.month = static_cast<int>(m);
  t.day = static_cast<int>(d);
  t.hour = hour;
  return t;
}

int day_of_year(int year, int month, int day) {
  return static_cast<int>(days_from_civil(year, month, day) -
                          days_from_civil(year, 1, 1)) + 1;
}

std::string iso8601(std::int64_t hours) {
  CivilTime t = civil_from_hours(hours);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00", t.year, t.month,
                t.day, t.hour);
  return buf;
}

std::int64_t parse_iso8601_hours(const std::string& text) {
  CivilTime t;
  int minute = 0, second = 0;
  int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &t.year, &t.month, &t.day,
                      &t.hour, &minute, &second);
  if (n < 4 || !valid_civil(t) || minute != 0 || second != 0) {
    throw ValidationError("invalid ISO-8601 hour timestamp '" + text + "'");
  }
  return hours_from_civil(t);
}

}  // namespace aero
