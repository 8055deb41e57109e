#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fdlsd::text {

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);
double parse_real(std::string_view token);
long long parse_int(std::string_view token);
bool parse_bool(std::string_view token);

std::vector<std::string_view> split(std::string_view line, char sep);
std::vector<std::string_view> split_whitespace(std::string_view line);
std::string_view trim(std::string_view s);

}  // namespace fdlsd::text
