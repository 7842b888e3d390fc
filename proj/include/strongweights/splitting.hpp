#pragma once

#include "strongweights/avg_point.hpp"
#include "strongweights/candidate.hpp"
#include "strongweights/exponents.hpp"
#include "strongweights/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace sw {

struct SplitConfig
{
  ClassKind   kind = ClassKind::MuckenhouptA;
  PParam      p{2.0};
  double      Q  = 2.0;
  double      Q1 = 2.1;
  double      c  = 0.2;
  std::size_t levels = 1;
  std::size_t segment_samples = 257;

  // Q1 = 1.05 Q, c = 0.2, 257 samples.
  static SplitConfig with_defaults(ClassKind kind, PParam p, double Q, std::size_t levels);

  // Throws PreconditionError unless Q1 > Q > 1, c in (0, 1/2] and samples >= 2.
  void validate() const;
};

// Axis with the longest edge; ties go to the smallest index. Negative lengths
// mark axes that cannot be split.
std::size_t choose_direction(std::span<const double> edge_lengths);

// Largest psi over lambda = k / (samples - 1) of lambda*a + (1 - lambda)*b.
double segment_max(const AvgPoint &a, const AvgPoint &b, ClassKind kind, PParam p, std::size_t samples);

struct SplitChoice
{
  std::size_t axis;
  std::size_t breakpoint; // index into the axis breakpoints; first child is [lo, breakpoint)
  double      ratio;      // mass(first child) / mass(parent)
  double      segment_max;
  AvgPoint    first;
  AvgPoint    second;
};

/// Admissible split of box along axis: ratio in (c, 1 - c) and the segment
/// between the child points inside psi <= Q1. Picks the ratio closest to 1/2,
/// ties to the smaller index. Throws InfeasibleSplit otherwise.
SplitChoice choose_position(const MomentTables &tables, const BoxIdx &box, std::size_t axis,
                            const SplitConfig &config);
SplitChoice choose_position(const WeightedGrid &grid, const BoxIdx &box, std::size_t axis,
                            const SplitConfig &config);

struct SplitNode
{
  BoxIdx                     box;
  AvgPoint                   x;
  double                     mass;
  std::size_t                level;
  double                     diameter;
  std::int64_t               parent = -1;
  std::int64_t               children[2] = {-1, -1};
  std::optional<SplitChoice> split; // empty for leaves
};

struct LevelDiagnostics
{
  std::size_t              level;
  std::vector<std::size_t> nodes;
  double                   max_diameter;
  // Mass-weighted L1 distance of the level's step functions to w and w^s,
  // relative to the root moments.
  double l1_x1;
  double l1_x2;
};

struct SplitTree
{
  SplitConfig                   config;
  double                        exponent; // s in x2 = <w^s>
  std::vector<SplitNode>        nodes;    // breadth-first; nodes[0] is the root
  std::vector<LevelDiagnostics> levels;   // 0 .. config.levels
};

/// Splits root recursively to depth config.levels. The caller is responsible
/// for checking that the weight characteristic on root is at most Q.
SplitTree build_tree(const WeightedGrid &grid, const BoxIdx &root, const SplitConfig &config);

struct ChainReport
{
  double              r;
  std::vector<double> sums;     // S_M for M = 0 .. depth
  double              terminal; // <w^r> over the root
};

ChainReport chain_report(const SplitTree &tree, const WeightedGrid &grid, double r,
                         const BellmanCandidate &candidate);

/// One row per node: node, parent, level, lo/hi per axis, axis, coordinate,
/// ratio, x1, x2, segment_max, diameter.
void write_trace_csv(std::ostream &out, const SplitTree &tree, const GridMeasure &measure);

} // namespace sw
