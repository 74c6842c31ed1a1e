#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace semmap {

/// Shortest decimal form that parses back to exactly `v`.
std::string format_double(double v);

/// Strict full-token double parse; false on any trailing garbage.
bool parse_double(std::string_view token, double& out);
bool parse_int(std::string_view token, long long& out);

std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);

/// Write to a sibling temporary file, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace semmap
