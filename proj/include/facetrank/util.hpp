#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace facetrank {

std::uint64_t fnv1a64(std::string_view data);

// 16 hex digits, zero padded.
std::string to_hex(std::uint64_t value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Splits on '\n'; a trailing '\r' per line is stripped. The final empty
// line produced by a trailing newline is dropped.
std::vector<std::string> split_lines(const std::string& text);

std::vector<std::string> split(const std::string& text, char sep);

std::string trim(std::string_view s);

bool has_whitespace(std::string_view s);

// Shortest-ish deterministic decimal rendering ("%.12g").
std::string format_score(double v);

}  // namespace facetrank
