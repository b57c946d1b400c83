#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeroforecast/errors.hpp"

namespace aero {

// Shortest round-trippable decimal representation of a double.
std::string format_double(double x);

// Strict full-token parse; returns nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view token);
std::optional<long> parse_int(std::string_view token);

// Plain comma split (the formats here never quote fields); CR stripped.
std::vector<std::string> split_csv_line(std::string_view line);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace aero
