#include "strongweights/bellman.hpp"

#include "strongweights/errors.hpp"
#include "strongweights/format.hpp"
#include "strongweights/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace sw {

namespace {

constexpr double kSlack = 1e-12;

} // namespace

const char *to_string(Membership m)
{
  switch (m) {
  case Membership::Below: return "below";
  case Membership::Inside: return "inside";
  case Membership::Above: return "above";
  }
  return "?";
}

const char *to_string(Trend t)
{
  switch (t) {
  case Trend::Stable: return "stable";
  case Trend::Converging: return "converging";
  case Trend::Divergent: return "divergent trend";
  case Trend::Undetermined: return "undetermined";
  }
  return "?";
}

OmegaDomain::OmegaDomain(ClassKind kind, PParam p, double Q) : kind(kind), p(p), Q(Q)
{
  if (!(Q > 1.0) || !std::isfinite(Q))
    throw PreconditionError("Q must exceed 1, got " + fmt_exact(Q));
}

Membership OmegaDomain::classify(const AvgPoint &x) const
{
  if (!(x.x1 > 0.0) || !(x.x2 > 0.0))
    throw PreconditionError("domain membership needs positive coordinates, got (" + fmt_exact(x.x1) + ", " +
                            fmt_exact(x.x2) + ")");
  const double v = psi(x);
  if (v < 1.0 - kSlack)
    return Membership::Below;
  if (v > Q * (1.0 + kSlack))
    return Membership::Above;
  return Membership::Inside;
}

AvgPoint OmegaDomain::lower_boundary(double x1) const
{
  if (kind == ClassKind::MuckenhouptA)
    return {x1, std::pow(x1, p.p1())};
  return {x1, std::pow(x1, p.p())};
}

void check_r_range(ClassKind kind, PParam p, double Q, double r)
{
  const SharpRange range = sharp_range(kind, p, Q);
  const double     lo    = 1.0 / range.s_minus;
  const double     hi    = 1.0 / range.s_plus;
  const double     mid_lo = kind == ClassKind::MuckenhouptA ? p.p1() : 1.0;
  const double     mid_hi = kind == ClassKind::MuckenhouptA ? 1.0 : p.p();
  const bool       ok     = (r > lo && r <= mid_lo) || (r >= mid_hi && r < hi);
  if (!ok || !std::isfinite(r))
    throw PreconditionError("r = " + fmt_exact(r) + " is outside the admissible range (" + fmt_short(lo) + ", " +
                            fmt_short(mid_lo) + "] U [" + fmt_short(mid_hi) + ", " + fmt_short(hi) + ") for " +
                            std::string(to_string(kind)) + " with p = " + fmt_short(p.p()) + ", Q = " + fmt_short(Q));
}

VerificationReport verify_candidate(const OmegaDomain &domain, const BellmanCandidate &candidate, double r,
                                    const VerifyOptions &options)
{
  check_r_range(domain.kind, domain.p, domain.Q, r);
  const CandidateInfo &info = candidate.info();
  if (info.kind != domain.kind || std::abs(info.p - domain.p.p()) > 1e-12 * domain.p.p())
    throw PreconditionError("candidate was built for " + std::string(to_string(info.kind)) + " with p = " +
                            fmt_short(info.p) + ", domain is " + std::string(to_string(domain.kind)) + " with p = " +
                            fmt_short(domain.p.p()));
  if (!(options.tolerance >= 0.0))
    throw PreconditionError("tolerance must be non-negative");

  VerificationReport rep;
  rep.boundary_tolerance = options.tolerance + info.accuracy;
  const double rel_tol   = options.tolerance + 2.0 * info.accuracy;

  const auto track = [&](const AvgPoint &x, double b) {
    const double c = b / std::pow(x.x1, r);
    if (!(c <= rep.c_hat)) {
      rep.c_hat    = c;
      rep.c_hat_at = x;
    }
  };

  try {
    // Boundary condition on a log-uniform lattice.
    const std::size_t nb = std::max<std::size_t>(options.boundary_points, 2);
    for (std::size_t k = 0; k < nb; ++k) {
      const double   u   = info.log_x1_lo + (info.log_x1_hi - info.log_x1_lo) * static_cast<double>(k) / (nb - 1);
      const AvgPoint x   = domain.lower_boundary(std::exp(u));
      const double   b   = candidate(x);
      const double   ref = std::pow(x.x1, r);
      const double   err = std::abs(b - ref) / ref;
      if (!(err <= rep.boundary_max_error)) {
        rep.boundary_max_error = err;
        rep.boundary_worst     = x;
      }
      track(x, b);
    }

    // Random in-domain segments.
    std::mt19937_64                        rng(options.seed);
    std::uniform_real_distribution<double> du(info.log_x1_lo, info.log_x1_hi);
    std::uniform_real_distribution<double> dv(0.0, std::log(domain.Q));
    const std::size_t                      max_attempts = 200 * std::max<std::size_t>(options.segments, 1);
    const double                           lambdas[]    = {0.5, 0.25, 0.75};
    for (std::size_t attempt = 0; rep.segments_tested < options.segments && attempt < max_attempts; ++attempt) {
      const double   u1 = du(rng), v1 = dv(rng), u2 = du(rng), v2 = dv(rng);
      const AvgPoint a  = domain.at(std::exp(u1), std::exp(v1));
      const AvgPoint b  = domain.at(std::exp(u2), std::exp(v2));
      if (segment_max(a, b, domain.kind, domain.p, options.segment_samples) > domain.Q) {
        ++rep.segments_rejected;
        continue;
      }
      ++rep.segments_tested;
      const double ba = candidate(a);
      const double bb = candidate(b);
      track(a, ba);
      track(b, bb);
      for (double lambda : lambdas) {
        const AvgPoint x       = lerp(a, b, lambda);
        const double   bx      = candidate(x);
        const double   chord   = lambda * ba + (1.0 - lambda) * bb;
        const double   deficit = chord - bx;
        const double   allowed = rel_tol * std::max({std::abs(ba), std::abs(bb), std::abs(bx)});
        track(x, bx);
        if (deficit > allowed)
          rep.violations.push_back({a, b, lambda, deficit, allowed});
      }
    }
  } catch (const CandidateDomainError &e) {
    rep.failure = e.what();
  }

  rep.passed = rep.failure.empty() && rep.violations.empty() && rep.boundary_max_error <= rep.boundary_tolerance &&
               std::isfinite(rep.c_hat);
  return rep;
}

void write_verification_csv(std::ostream &out, const VerificationReport &rep)
{
  out << "kind,a_x1,a_x2,b_x1,b_x2,lambda,deficit,allowed\n";
  for (const auto &v : rep.violations)
    out << "violation," << fmt_exact(v.a.x1) << ',' << fmt_exact(v.a.x2) << ',' << fmt_exact(v.b.x1) << ','
        << fmt_exact(v.b.x2) << ',' << fmt_exact(v.lambda) << ',' << fmt_exact(v.deficit) << ','
        << fmt_exact(v.allowed) << '\n';
}

TrendReport classify_trend(const std::vector<double> &values, const TrendOptions &options)
{
  if (values.size() < 2)
    throw PreconditionError("a trend needs at least two values");
  const std::size_t n = values.size();
  TrendReport       rep{Trend::Undetermined, std::abs(values[n - 1] - values[n - 2]) / std::abs(values[n - 2]),
                  std::nullopt, std::nullopt};
  if (n >= 3) {
    const double d1 = values[n - 2] - values[n - 3];
    const double d2 = values[n - 1] - values[n - 2];
    if (d1 != 0.0)
      rep.increment_ratio = d2 / d1;
  }
  if (rep.last_relative_change <= options.stable_tolerance) {
    rep.trend = Trend::Stable;
    return rep;
  }
  if (n < 3)
    return rep;

  bool increasing = true;
  for (std::size_t i = 1; i < n; ++i)
    increasing = increasing && values[i] > values[i - 1];
  if (std::isinf(values[n - 1]) || (increasing && rep.increment_ratio && *rep.increment_ratio >= options.divergence_ratio)) {
    rep.trend = Trend::Divergent;
    return rep;
  }
  rep.trend = Trend::Converging;
  if (rep.increment_ratio && *rep.increment_ratio > 0.0 && *rep.increment_ratio < 1.0) {
    const double rho = *rep.increment_ratio;
    rep.extrapolated = values[n - 1] + (values[n - 1] - values[n - 2]) * rho / (1.0 - rho);
  }
  return rep;
}

ConclusionReport theorem_conclusion_check(const WeightedGrid &grid, ClassKind hypothesis, PParam p, double Q,
                                          ClassKind target, double q, const std::vector<unsigned> &refinements,
                                          const TrendOptions &trend, const ScanOptions &scan)
{
  const SharpRange range = sharp_range(hypothesis, p, Q);
  const auto       hyp   = characteristic(grid, hypothesis, p.p(), scan);
  if (!(hyp.value <= Q * (1.0 + kSlack)))
    throw PreconditionError("hypothesis characteristic " + fmt_short(hyp.value) + " exceeds Q = " + fmt_short(Q) +
                            " on box " + to_string(hyp.argmax));

  ConclusionReport rep{hypothesis, p.p(), Q, target, q, range, false, hyp.value, {}, {}, {}, {}};
  rep.inside_range = target == ClassKind::MuckenhouptA ? q > range.a_lower : (q >= 1.0 && q < range.rh_upper);

  WeightedGrid g = grid;
  for (std::size_t k = 0;; ++k) {
    const auto c = characteristic(g, target, q, scan);
    rep.cells.push_back(g.shape.size());
    rep.values.push_back(c.value);
    rep.argmax.push_back(c.argmax);
    if (k == refinements.size())
      break;
    g = refine(g, refinements[k]);
  }
  if (rep.values.size() >= 2)
    rep.trend = classify_trend(rep.values, trend);
  else
    rep.trend = TrendReport{Trend::Undetermined, 0.0, std::nullopt, std::nullopt};
  return rep;
}

} // namespace sw
