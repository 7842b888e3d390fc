#pragma once

#include "strongweights/avg_point.hpp"
#include "strongweights/candidate.hpp"
#include "strongweights/characteristics.hpp"
#include "strongweights/exponents.hpp"
#include "strongweights/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sw {

enum class Membership { Below, Inside, Above };

const char *to_string(Membership m);

/// The set of points with 1 <= psi(x) <= Q.
struct OmegaDomain
{
  ClassKind kind;
  PParam    p;
  double    Q;

  OmegaDomain(ClassKind kind, PParam p, double Q);

  double     psi(const AvgPoint &x) const { return sw::psi(kind, p, x); }
  Membership classify(const AvgPoint &x) const; // 1e-12 slack at both edges

  // Point with psi = 1 and the given first coordinate.
  AvgPoint lower_boundary(double x1) const;
  AvgPoint at(double x1, double psi_value) const { return point_from_psi(kind, p, x1, psi_value); }
};

/// Throws PreconditionError unless r lies in the admissible range for the
/// class: (1/s-, p1] U [1, 1/s+) for A, (1/s-, 1] U [p, 1/s+) for RH.
void check_r_range(ClassKind kind, PParam p, double Q, double r);

struct VerifyOptions
{
  std::size_t   segments        = 1000;
  std::uint64_t seed            = 0;
  double        tolerance       = 1e-9;
  std::size_t   boundary_points = 201;
  std::size_t   segment_samples = 257;
};

struct ConcavityViolation
{
  AvgPoint a;
  AvgPoint b;
  double   lambda;
  double   deficit; // lambda B(a) + (1 - lambda) B(b) - B(lambda a + (1 - lambda) b)
  double   allowed;
};

struct VerificationReport
{
  std::size_t                     segments_tested = 0;
  std::size_t                     segments_rejected = 0;
  std::vector<ConcavityViolation> violations;
  double                          boundary_max_error = 0.0; // relative to x1^r
  double                          boundary_tolerance = 0.0;
  AvgPoint                        boundary_worst{1.0, 1.0};
  double                          c_hat = 0.0;
  AvgPoint                        c_hat_at{1.0, 1.0};
  std::string                     failure; // set when the candidate could not be evaluated
  bool                            passed = false;
};

/// Samples segments inside the domain and checks concavity of the candidate at
/// lambda = 1/4, 1/2, 3/4, the boundary condition B = x1^r on psi = 1, and
/// estimates sup B / x1^r. Tolerances are widened by the candidate's declared
/// accuracy. Deterministic for a fixed seed.
VerificationReport verify_candidate(const OmegaDomain &domain, const BellmanCandidate &candidate, double r,
                                    const VerifyOptions &options = {});

void write_verification_csv(std::ostream &out, const VerificationReport &report);

// Undetermined: fewer than three values and no stabilization yet.
enum class Trend { Stable, Converging, Divergent, Undetermined };

const char *to_string(Trend t);

struct TrendOptions
{
  double stable_tolerance = 0.01; // relative change between the last two refinements
  double divergence_ratio = 0.85; // ratio of the last two increments
};

struct TrendReport
{
  Trend                 trend;
  double                last_relative_change;
  std::optional<double> increment_ratio;
  std::optional<double> extrapolated; // geometric tail estimate for Converging
};

TrendReport classify_trend(const std::vector<double> &values, const TrendOptions &options = {});

struct ConclusionReport
{
  ClassKind                hypothesis;
  double                   p;
  double                   Q;
  ClassKind                target;
  double                   q;
  SharpRange               range;
  bool                     inside_range;
  double                   hypothesis_value; // characteristic on the coarsest grid
  std::vector<std::size_t> cells;            // cells per grid in the sequence
  std::vector<double>      values;           // target characteristic per grid
  std::vector<BoxIdx>      argmax;
  TrendReport              trend;
};

/// Checks the hypothesis characteristic on grid (must be <= Q), then computes
/// the target characteristic along grid, refine(grid, f1), refine(.., f2), ...
/// and classifies the resulting sequence.
ConclusionReport theorem_conclusion_check(const WeightedGrid &grid, ClassKind hypothesis, PParam p, double Q,
                                          ClassKind target, double q, const std::vector<unsigned> &refinements,
                                          const TrendOptions &trend = {}, const ScanOptions &scan = {});

} // namespace sw
