#include "crbt/text_io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace crbt {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double_strict(const std::string& s) {
  if (s.empty()) throw std::runtime_error("empty numeric field");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("bad numeric field: '" + s + "'");
  }
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r'))
    ++pos;
  if (pos != s.size())
    throw std::runtime_error("trailing characters in numeric field: '" + s + "'");
  if (!std::isfinite(v))
    throw std::runtime_error("non-finite value in numeric field: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace crbt
