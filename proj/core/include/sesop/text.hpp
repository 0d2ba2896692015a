#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sesop {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

/// Parses "key=value,key=value" (whitespace around tokens ignored).
/// Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

}  // namespace sesop
