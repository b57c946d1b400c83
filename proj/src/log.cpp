#include "aeroforecast/log.hpp"

#include <cstdlib>
#include <iostream>

#include "aeroforecast/io_util.hpp"

namespace aero {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("AEROFORECAST_LOG");
    if (!env) return LogLevel::error;
    std::string v = to_lower(env);
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

namespace {

void emit(LogLevel at_least, const char* tag, std::string_view message) {
  if (log_level() >= at_least) {
    std::cerr << tag << message << '\n';
  }
}

}  // namespace

void log_error(std::string_view message) { emit(LogLevel::error, "[error] ", message); }
void log_info(std::string_view message) { emit(LogLevel::info, "[info] ", message); }
void log_debug(std::string_view message) { emit(LogLevel::debug, "[debug] ", message); }

}  // namespace aero
