#pragma once

#include <string>
#include <vector>

namespace crbt {

// 17 significant digits: enough for exact double round-trips in every file
// format this library emits.
std::string format_g17(double v);

// Parses a complete token as a finite double; throws std::runtime_error on
// junk, trailing characters, or non-finite values.
double parse_double_strict(const std::string& s);

std::vector<std::string> split(const std::string& line, char sep);

}  // namespace crbt
