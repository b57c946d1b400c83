#pragma once

#include <string_view>

namespace aero {

// Verbosity of diagnostics on stderr, controlled by the AEROFORECAST_LOG
// environment variable ({error, info, debug}; default error). Standard
// output stays reserved for data.
enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level();

void log_error(std::string_view message);
void log_info(std::string_view message);
void log_debug(std::string_view message);

}  // namespace aero
