#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace notimind {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Fixed-point text with the given number of decimals.
std::string format_fixed(double value, int decimals);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::string to_lower(std::string_view text);

// "key = value" lines; '#' starts a comment. Later keys override earlier.
struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};
std::vector<KeyValue> parse_key_value(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace notimind
