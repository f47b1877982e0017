#pragma once

#include <cstdio>
#include <string>

namespace rcsync {

/// Format a double with 17 significant digits (round-trip exact).
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// RFC-4180 field quoting: quote only when the text needs it.
inline std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

} // namespace rcsync
