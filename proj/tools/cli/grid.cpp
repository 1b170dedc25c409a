#include "grid.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>

#include "sinebeta/error.hpp"

namespace sinebeta::cli {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

long to_long(const std::string& s, const std::string& whole) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0) throw_config("bad integer grid: " + whole);
  return v;
}

double to_double(const std::string& s, const std::string& whole) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || errno != 0 || !std::isfinite(v)) {
    throw_config("bad real grid: " + whole);
  }
  return v;
}

}  // namespace

std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> out;
  for (const std::string& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<int>(to_long(part, text)));
      continue;
    }
    const long lo = to_long(part.substr(0, dots), text);
    const long hi = to_long(part.substr(dots + 2), text);
    if (hi < lo || hi - lo > 1000000) throw_config("bad integer range: " + text);
    for (long v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw_config("empty grid");
  return out;
}

std::vector<double> parse_real_grid(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_double(part, text));
      continue;
    }
    const auto colon = part.find(':', dots);
    if (colon == std::string::npos) throw_config("real range needs a point count: " + text);
    const double lo = to_double(part.substr(0, dots), text);
    const double hi = to_double(part.substr(dots + 2, colon - dots - 2), text);
    const long count = to_long(part.substr(colon + 1), text);
    if (count < 1 || count > 100000 || hi < lo) throw_config("bad real range: " + text);
    if (count == 1) {
      out.push_back(lo);
      continue;
    }
    for (long k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * k / (count - 1));
  }
  return out;
}

}  // namespace sinebeta::cli
