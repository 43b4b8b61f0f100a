#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace texclass::text {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s, std::string_view field);
unsigned long long parse_unsigned(std::string_view s, std::string_view field);

std::vector<std::string_view> split(std::string_view line, char sep);
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace texclass::text
