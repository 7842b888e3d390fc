#pragma once

#include "strongweights/exponents.hpp"

#include <cmath>

namespace sw {

// Pair of box averages (<w>, <w^s>) with s = p1 for the A-class and s = p for
// the RH-class.
struct AvgPoint
{
  double x1;
  double x2;
};

inline AvgPoint lerp(const AvgPoint &a, const AvgPoint &b, double lambda)
{
  return {lambda * a.x1 + (1.0 - lambda) * b.x1, lambda * a.x2 + (1.0 - lambda) * b.x2};
}

// Power applied to w in the second coordinate of an AvgPoint.
inline double moment_exponent(ClassKind kind, double q)
{
  return kind == ClassKind::MuckenhouptA ? -1.0 / (q - 1.0) : q;
}

// Characteristic functional of one box, for a raw exponent q (q = 1 is allowed
// for the RH-class and gives exactly x2 / x1).
//   A-class:  x1 * x2^(q-1)
//   RH-class: x2^(1/q) / x1
inline double psi(ClassKind kind, double q, double x1, double x2)
{
  if (kind == ClassKind::MuckenhouptA)
    return x1 * std::pow(x2, q - 1.0);
  return (q == 1.0 ? x2 : std::pow(x2, 1.0 / q)) / x1;
}

inline double psi(ClassKind kind, PParam p, const AvgPoint &x)
{
  return psi(kind, p.p(), x.x1, x.x2);
}

} // namespace sw
