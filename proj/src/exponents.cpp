#include "strongweights/exponents.hpp"

#include "strongweights/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace sw {

namespace {

constexpr int    kMaxIterations    = 200;
constexpr double kResidualTolerance = 1e-12;

std::string num(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// log(1 - a*s); the fused product keeps the factor exact near its zero.
double log_factor(double a, double s)
{
  const double x = a * s;
  return std::abs(x) < 0.5 ? std::log1p(-x) : std::log(std::fma(-a, s, 1.0));
}

// log of the implicit left-hand side; -inf where a factor vanishes.
double log_lhs(ClassKind kind, PParam p, double s)
{
  if (kind == ClassKind::MuckenhouptA)
    return std::log1p(-s) + (p.p() - 1.0) * log_factor(p.p1(), s);
  return log_factor(p.p(), s) / p.p() - std::log1p(-s);
}

double dlog_lhs(ClassKind kind, PParam p, double s)
{
  if (kind == ClassKind::MuckenhouptA)
    return s * (p.p1() - 1.0) / ((1.0 - s) * (1.0 - p.p1() * s));
  return s * (1.0 - p.p()) / ((1.0 - p.p() * s) * (1.0 - s));
}

void check_domain(ClassKind kind, PParam p, double s)
{
  if (!std::isfinite(s))
    throw PreconditionError("implicit_value: s must be finite, got " + num(s));
  if (kind == ClassKind::MuckenhouptA) {
    if (std::fma(-p.p1(), s, 1.0) < 0.0)
      throw PreconditionError("implicit_value: factor (1 - p1*s) is negative at s = " + num(s));
    if (1.0 - s < 0.0)
      throw PreconditionError("implicit_value: factor (1 - s) is negative at s = " + num(s));
  } else {
    if (std::fma(-p.p(), s, 1.0) < 0.0)
      throw PreconditionError("implicit_value: factor (1 - p*s) is negative at s = " + num(s));
  }
}

// Bisects an increasing G down to adjacent doubles and returns the endpoint
// with the smaller residual.
template <class Fn, class Res>
double pin_root(const Fn &G, const Res &residual_at, double lo, double hi)
{
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    const double g = G(mid);
    if (g == 0.0)
      return mid;
    (g < 0.0 ? lo : hi) = mid;
  }
  if (std::nextafter(lo, hi) != hi)
    throw NumericFailure("solve_branch: bracket did not collapse", lo, hi);
  return residual_at(lo) <= residual_at(hi) ? lo : hi;
}

// Solves log_lhs(s) = log_t on the requested branch. The branch is monotone,
// so a sign-changing bracket always exists; Newton steps only accelerate.
double solve_log(ClassKind kind, PParam p, double log_t, double t, Branch branch)
{
  if (log_t == 0.0)
    return 0.0;

  double lo = 0.0, hi = 0.0;
  // G is increasing on [lo, hi] with G(lo) < 0 < G(hi).
  const bool  increasing = branch == Branch::Minus;
  const auto  G          = [&](double s) {
    const double f = log_lhs(kind, p, s) - log_t;
    return increasing ? f : -f;
  };
  const auto dG = [&](double s) {
    const double d = dlog_lhs(kind, p, s);
    return increasing ? d : -d;
  };

  if (kind == ClassKind::MuckenhouptA) {
    if (branch == Branch::Plus)
      hi = 1.0;
    else
      lo = 1.0 / p.p1();
  } else if (branch == Branch::Plus) {
    hi = 1.0 / p.p();
  } else {
    lo = -1.0;
    int doublings = 0;
    while (!(G(lo) < 0.0)) {
      if (++doublings > 1100 || !std::isfinite(lo))
        throw NumericFailure("solve_branch: could not bracket the unbounded branch", lo, 0.0);
      lo *= 2.0;
    }
  }

  const auto residual_at = [&](double s) {
    const double v = std::exp(log_lhs(kind, p, s));
    return std::isfinite(v) ? std::abs(v - t) : std::numeric_limits<double>::infinity();
  };

  double x     = 0.5 * (lo + hi);
  double g_old = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIterations; ++it) {
    const double g = G(x);
    if (g == 0.0)
      return x;
    if (g < 0.0)
      lo = x;
    else
      hi = x;

    double       next   = 0.5 * (lo + hi);
    const double d      = dG(x);
    const double newton = x - g / d;
    if (std::isfinite(newton) && newton > lo && newton < hi && std::abs(g) < 0.5 * g_old)
      next = newton;
    g_old = std::abs(g);

    const double eps = 4.0 * std::numeric_limits<double>::epsilon();
    if (std::abs(next - x) <= eps * std::abs(x) || hi - lo <= eps * std::max(std::abs(lo), std::abs(hi))) {
      double best = next, best_res = residual_at(next);
      for (double c : {x, lo, hi}) {
        const double r = residual_at(c);
        if (r < best_res) {
          best     = c;
          best_res = r;
        }
      }
      if (best_res <= kResidualTolerance)
        return best;
      // Near a pole the residual can exceed the tolerance for every double;
      // then the answer is the better of two adjacent doubles around the root.
      return pin_root(G, residual_at, lo, hi);
    }
    x = next;
  }
  if (residual_at(x) <= kResidualTolerance)
    return x;
  throw NumericFailure("solve_branch: iteration cap reached", lo, hi);
}

} // namespace

std::string_view to_string(ClassKind kind)
{
  return kind == ClassKind::MuckenhouptA ? "ap" : "rh";
}

std::string_view to_string(Branch branch)
{
  return branch == Branch::Plus ? "plus" : "minus";
}

ClassKind parse_class_kind(std::string_view text)
{
  if (text == "ap" || text == "a" || text == "A" || text == "muckenhoupt")
    return ClassKind::MuckenhouptA;
  if (text == "rh" || text == "RH" || text == "reverse-holder")
    return ClassKind::ReverseHolder;
  throw PreconditionError("unknown class '" + std::string(text) + "' (expected ap or rh)");
}

Branch parse_branch(std::string_view text)
{
  if (text == "plus" || text == "+")
    return Branch::Plus;
  if (text == "minus" || text == "-")
    return Branch::Minus;
  throw PreconditionError("unknown branch '" + std::string(text) + "' (expected plus or minus)");
}

PParam::PParam(double p) : p_(p)
{
  if (!(p > 1.0) || !std::isfinite(p))
    throw PreconditionError("p must exceed 1, got " + num(p));
}

double implicit_value(ClassKind kind, PParam p, double s)
{
  check_domain(kind, p, s);
  return std::exp(log_lhs(kind, p, s));
}

double solve_branch(ClassKind kind, PParam p, double t, Branch branch)
{
  if (!(t > 0.0))
    throw PreconditionError("solve_branch: t must lie in (0, 1], got " + num(t));
  if (!(t <= 1.0))
    throw PreconditionError("solve_branch: t must lie in (0, 1], got " + num(t));
  return solve_log(kind, p, std::log(t), t, branch);
}

SharpRange sharp_range(ClassKind kind, PParam p, double Q)
{
  if (!(Q > 1.0) || !std::isfinite(Q))
    throw PreconditionError("Q must exceed 1, got " + num(Q));
  const double log_t = -std::log(Q);
  SharpRange   r{kind, p, Q, 0.0, 0.0, 0.0, 0.0};
  r.s_minus  = solve_log(kind, p, log_t, 1.0 / Q, Branch::Minus);
  r.s_plus   = solve_log(kind, p, log_t, 1.0 / Q, Branch::Plus);
  r.a_lower  = 1.0 - r.s_minus;
  r.rh_upper = 1.0 / r.s_plus;
  return r;
}

double extremal_alpha(ClassKind kind, PParam p, double Q, Branch side)
{
  if (!(Q > 1.0) || !std::isfinite(Q))
    throw PreconditionError("Q must exceed 1, got " + num(Q));
  return -solve_log(kind, p, -std::log(Q), 1.0 / Q, side);
}

double analytic_power_characteristic(ClassKind kind, PParam p, double alpha)
{
  if (!std::isfinite(alpha))
    throw PreconditionError("alpha must be finite");
  if (kind == ClassKind::MuckenhouptA) {
    if (!(alpha > -1.0))
      throw PreconditionError("integral of w = x^alpha diverges at 0 for alpha = " + num(alpha));
    if (!(std::fma(alpha, p.p1(), 1.0) > 0.0))
      throw PreconditionError("integral of w^p1 = x^(alpha*p1) diverges at 0 for alpha = " + num(alpha));
    return std::exp(-std::log1p(alpha) + log_factor(-p.p1(), alpha) / p.p1());
  }
  if (!(std::fma(alpha, p.p(), 1.0) > 0.0))
    throw PreconditionError("integral of w^p = x^(alpha*p) diverges at 0 for alpha = " + num(alpha));
  return std::exp(std::log1p(alpha) - log_factor(-p.p(), alpha) / p.p());
}

} // namespace sw
