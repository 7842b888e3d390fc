#pragma once

#include <cstdio>
#include <string>

namespace sw {

// Shortest-safe round-trip decimal ("%.17g").
inline std::string fmt_exact(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Compact human-readable rendering.
inline std::string fmt_short(double x, int digits = 10)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

} // namespace sw
