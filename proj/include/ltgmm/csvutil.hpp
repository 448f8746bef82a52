#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "ltgmm/errors.hpp"

namespace ltgmm::csv {

// Shortest decimal string that parses back to exactly the same double.
// Keeping output text canonical is what makes byte-identical reruns and
// cross-worker determinism checkable at the file level.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw IoError("malformed numeric field: '" + std::string(s) + "'");
  return v;
}

inline long long parse_int(std::string_view s) {
  long long v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw IoError("malformed integer field: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace ltgmm::csv
