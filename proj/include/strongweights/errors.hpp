#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sw {

// Violated precondition on a caller-supplied value (bad p, Q, box, grid ...).
class PreconditionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// A box of zero measure was queried for an average.
class ZeroMeasureBox : public PreconditionError
{
public:
  using PreconditionError::PreconditionError;
};

// Root finder hit its iteration cap; carries the last bracket.
class NumericFailure : public std::runtime_error
{
public:
  NumericFailure(const std::string &what, double lo, double hi)
    : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi)
  {
  }
  double bracket_lo;
  double bracket_hi;
};

// No admissible split position exists for a node of a split tree.
class InfeasibleSplit : public std::runtime_error
{
public:
  InfeasibleSplit(const std::string &what, double best_ratio, double best_segment_max)
    : std::runtime_error(what), best_ratio(best_ratio), best_segment_max(best_segment_max)
  {
  }
  double best_ratio;
  double best_segment_max;
  // 0 = first child, 1 = second child, from the root down to the failing node.
  std::vector<int> node_path;
};

// A Bellman candidate was evaluated at a point where it is not defined.
class CandidateDomainError : public std::domain_error
{
public:
  CandidateDomainError(const std::string &what, double x1, double x2)
    : std::domain_error(what), x1(x1), x2(x2)
  {
  }
  double x1;
  double x2;
};

} // namespace sw
