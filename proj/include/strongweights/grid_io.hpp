#pragma once

#include "strongweights/grid.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace sw {

// Text grid format (whitespace separated, '#' starts a comment):
//
//   strongweights-grid 1
//   rank <n>
//   axis <i> <b_0> <b_1> ... <b_m>      one line per axis, strictly increasing
//   generator power <alpha>             optional; marks exact power-weight data
//   mass                                followed by prod(m_i) values, row-major
//   weight                              followed by prod(m_i) values, row-major
//
// Numbers are decimal or C99 hexadecimal float literals. Either section may be
// omitted so that a measure and a weight can live in separate files.
struct GridFile
{
  std::vector<std::vector<double>>   breakpoints;
  std::optional<std::vector<double>> mass;
  std::optional<std::vector<double>> weight;
  std::optional<double>              power_alpha;
};

GridFile read_grid_file(std::istream &in);
GridFile read_grid_file(const std::filesystem::path &path);

// Writes both sections with round-trip exact decimal literals.
void write_grid_file(std::ostream &out, const WeightedGrid &grid);

/// Combines a measure file and a weight file (which may be the same file).
WeightedGrid load_weighted_grid(const std::filesystem::path &measure_path,
                                const std::filesystem::path &weight_path);

// CSV table with one row per cell: flat index, per-axis index and extent, mass, weight.
void write_cell_csv(std::ostream &out, const WeightedGrid &grid);

} // namespace sw
