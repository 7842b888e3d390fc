#pragma once

#include <string>
#include <string_view>

namespace sw {

enum class ClassKind
{
  MuckenhouptA,
  ReverseHolder
};

// Plus is the decreasing solution branch of the implicit equation, Minus the
// increasing one.
enum class Branch
{
  Plus,
  Minus
};

std::string_view to_string(ClassKind kind);
std::string_view to_string(Branch branch);
// Accepts "ap"/"a"/"muckenhoupt" and "rh"/"reverse-holder".
ClassKind parse_class_kind(std::string_view text);
// Accepts "plus"/"+" and "minus"/"-".
Branch parse_branch(std::string_view text);

// Exponent p > 1 together with its dual p1 = -1/(p-1).
class PParam
{
public:
  explicit PParam(double p);

  double p() const { return p_; }
  double p1() const { return -1.0 / (p_ - 1.0); }

private:
  double p_;
};

struct SharpRange
{
  ClassKind kind;
  PParam    p;
  double    Q;
  double    s_minus;
  double    s_plus;
  double    a_lower;  // w is in A*_q for every q > a_lower
  double    rh_upper; // w is in RH*_q for every 1 <= q < rh_upper
};

/// Left-hand side of the implicit equation at s.
///
///   MuckenhouptA:  t = (1 - s) (1 - p1 s)^(-1/p1),   s in [1/p1, 1]
///   ReverseHolder: t = (1 - p s)^(1/p) (1 - s)^(-1), s <= 1/p
///
/// Throws PreconditionError when s leaves the branch domain.
double implicit_value(ClassKind kind, PParam p, double s);

/// Inverts implicit_value on one monotone branch for t in (0, 1].
/// Residual |implicit_value(s) - t| <= 1e-12 where some double achieves it;
/// close to the pole of the Plus branch no double does, and the result is then
/// the better of the two adjacent doubles that bracket the root.
/// t == 1 returns exactly 0.
double solve_branch(ClassKind kind, PParam p, double t, Branch branch);

/// Sharp self-improvement ranges for a weight with characteristic Q > 1.
SharpRange sharp_range(ClassKind kind, PParam p, double Q);

/// Exponent alpha of the power weight x^alpha on [0, 1] whose characteristic
/// equals Q; side selects which of the two extremizers.
double extremal_alpha(ClassKind kind, PParam p, double Q, Branch side);

/// Characteristic of x^alpha on intervals [0, h] (independent of h).
double analytic_power_characteristic(ClassKind kind, PParam p, double alpha);

} // namespace sw
