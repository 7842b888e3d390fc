#pragma once

#include "strongweights/avg_point.hpp"
#include "strongweights/exponents.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sw {

// Second coordinate of the point with first coordinate x1 and functional value psi.
inline AvgPoint point_from_psi(ClassKind kind, PParam p, double x1, double psi_value)
{
  if (kind == ClassKind::MuckenhouptA)
    return {x1, std::pow(psi_value / x1, 1.0 / (p.p() - 1.0))};
  return {x1, std::pow(psi_value * x1, p.p())};
}

struct CandidateInfo
{
  ClassKind   kind;
  double      p;
  double      r;
  double      Q;
  std::string source;
  // Relative evaluation accuracy; verification tolerances are widened by it.
  double accuracy = 0.0;
  // Range of log(x1) over which the candidate is defined or should be sampled.
  double log_x1_lo = -3.0;
  double log_x1_hi = 3.0;
};

class BellmanCandidate
{
public:
  using Fn = std::function<double(const AvgPoint &)>;

  BellmanCandidate(CandidateInfo info, Fn fn);

  // Throws CandidateDomainError when the value is undefined, non-finite or negative.
  double operator()(const AvgPoint &x) const;

  const CandidateInfo &info() const { return info_; }

private:
  CandidateInfo info_;
  Fn            fn_;
};

// B(x) = x1, the exact candidate for r = 1.
BellmanCandidate linear_candidate(ClassKind kind, PParam p, double Q);

/// Candidate values on a lattice uniform in (log x1, log psi). Evaluation is
/// bilinear interpolation of log B between the four surrounding nodes.
///
/// File layout:
///
///   strongweights-candidate 1
///   class <ap|rh>
///   p <p>
///   r <r>
///   Q <Q>
///   accuracy <relative interpolation error bound>
///   log_x1 <lo> <hi> <count>
///   log_psi <lo> <hi> <count>
///   values
///   <count_x1 rows, each holding count_psi values; row i is log x1 = lo + i*h>
struct CandidateTable
{
  ClassKind           kind = ClassKind::MuckenhouptA;
  double              p    = 2.0;
  double              r    = 1.0;
  double              Q    = 2.0;
  double              accuracy = 0.0;
  double              u_lo = 0.0, u_hi = 0.0; // log x1
  std::size_t         nu   = 0;
  double              v_lo = 0.0, v_hi = 0.0; // log psi
  std::size_t         nv   = 0;
  std::vector<double> values;                 // nu * nv, row-major in u

  double node_u(std::size_t i) const { return u_lo + (u_hi - u_lo) * static_cast<double>(i) / (nu - 1); }
  double node_v(std::size_t j) const { return v_lo + (v_hi - v_lo) * static_cast<double>(j) / (nv - 1); }
};

CandidateTable read_candidate_table(std::istream &in);
CandidateTable read_candidate_table(const std::filesystem::path &path);
void           write_candidate_table(std::ostream &out, const CandidateTable &table);

/// Fills a table by evaluating fn at every lattice node.
CandidateTable tabulate(ClassKind kind, PParam p, double r, double Q, double u_lo, double u_hi, std::size_t nu,
                        std::size_t nv, const std::function<double(const AvgPoint &)> &fn);

BellmanCandidate tabulated_candidate(CandidateTable table, std::string source = "tabulated");

} // namespace sw
