#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lhnfc {

// Shortest decimal string that round-trips the exact double. Every number
// written into a model file or dataset dump goes through this, which is what
// makes save/load bit-exact.
std::string format_double(double v);

// Strict full-field parses; return false on any trailing junk.
bool parse_double(std::string_view s, double& out);
bool parse_long(std::string_view s, long& out);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);

}  // namespace lhnfc
