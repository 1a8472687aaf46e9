#pragma once

#include <charconv>
#include <string>
#include <vector>

namespace fracfield {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace fracfield
