#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dg::util {

std::vector<std::string> split_lines(std::string_view text);
std::vector<std::string> split_ws(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);
// Throws ParseError (tagged with `line` when non-zero).
std::size_t parse_size(std::string_view text, std::size_t line = 0);
std::uint64_t parse_u64(std::string_view text, std::size_t line = 0);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace dg::util
