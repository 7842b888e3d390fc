#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sw {

constexpr std::size_t kMaxRank = 3;

using CellIndex = std::array<std::size_t, kMaxRank>;

// Extents of an n-dimensional cell lattice, row-major (last axis fastest).
class Shape
{
public:
  Shape() = default;
  explicit Shape(std::vector<std::size_t> extents);

  std::size_t rank() const { return rank_; }
  std::size_t extent(std::size_t axis) const { return extent_[axis]; }
  std::size_t size() const { return size_; }

  std::size_t flat(const CellIndex &idx) const;
  CellIndex   unflat(std::size_t flat) const;

  bool operator==(const Shape &) const = default;

private:
  std::size_t rank_ = 0;
  CellIndex   extent_{};
  std::size_t size_ = 0;
};

std::string to_string(const CellIndex &idx, std::size_t rank);

// Axis-parallel box: half-open cell ranges [lo[i], hi[i]) per axis.
struct BoxIdx
{
  std::size_t rank = 0;
  CellIndex   lo{};
  CellIndex   hi{};

  static BoxIdx full(const Shape &shape);

  std::size_t cells() const;
  bool        contains(const CellIndex &idx) const;

  bool operator==(const BoxIdx &) const = default;
};

// Lexicographic order on (lo0, hi0, lo1, hi1, ...); used to break argmax ties.
bool lex_less(const BoxIdx &a, const BoxIdx &b);

std::string to_string(const BoxIdx &box);

// Throws PreconditionError unless 0 <= lo < hi <= extent on every axis.
void check_box(const Shape &shape, const BoxIdx &box);

struct GridMeasure
{
  std::vector<std::vector<double>> breakpoints; // per axis, extent + 1 entries
  std::vector<double>              mass;        // row-major, one per cell

  Shape  shape() const;
  double total_mass() const;
};

struct WeightGrid
{
  std::vector<double> values;
  // Set when the values are exact cell averages of x^alpha on [0, 1]; refine()
  // then regenerates instead of copying.
  std::optional<double> power_alpha;
};

// A measure/weight pair that passed validate().
struct WeightedGrid
{
  GridMeasure measure;
  WeightGrid  weight;
  Shape       shape;
};

WeightedGrid validate(GridMeasure measure, WeightGrid weight);

// Physical edge lengths of a box (unused axes are zero).
std::array<double, kMaxRank> edge_lengths(const GridMeasure &measure, const BoxIdx &box);
double                       diameter(const GridMeasure &measure, const BoxIdx &box);

// w^s for one cell; shared by every route that forms power moments.
double cell_power(double w, double s);

// Cumulative sums over a zero-padded lattice of extents (m_i + 1): entry J is
// the sum over cells [0, J). Stored in extended precision and built with
// compensated summation along each axis.
class PrefixTable
{
public:
  PrefixTable() = default;
  PrefixTable(const Shape &cells, std::span<const double> cell_values);

  double box_sum(const BoxIdx &box) const;

  const Shape                    &padded() const { return padded_; }
  const std::vector<long double> &data() const { return data_; }

private:
  Shape                    padded_;
  std::vector<long double> data_;
};

// Integer prefix counts; exact membership tests (positive mass, overflow).
class CountTable
{
public:
  CountTable() = default;
  CountTable(const Shape &cells, std::span<const std::uint8_t> flags);

  std::int64_t box_count(const BoxIdx &box) const;

  const Shape                     &padded() const { return padded_; }
  const std::vector<std::int64_t> &data() const { return data_; }

private:
  Shape                     padded_;
  std::vector<std::int64_t> data_;
};

/// Prefix tables for the moments sum(mass * w^s) over a fixed exponent set.
/// Exponents 0 (mass) and 1 (w) are always present. Cells whose w^s overflows
/// are excluded from the sums and counted instead; any box containing one has
/// an infinite moment.
class MomentTables
{
public:
  MomentTables(const WeightedGrid &grid, std::span<const double> exponents);

  const Shape &shape() const { return shape_; }

  bool   has_mass(const BoxIdx &box) const { return positive_.box_count(box) > 0; }
  double mass(const BoxIdx &box) const { return moment(box, 0.0); }
  double moment(const BoxIdx &box, double s) const;
  // Throws ZeroMeasureBox when the box carries no mass.
  double average(const BoxIdx &box, double s) const;

  struct Entry
  {
    double      exponent;
    PrefixTable sums;
    CountTable  overflow;
    bool        any_overflow;
  };
  const Entry      &entry(double s) const;
  const CountTable &positive() const { return positive_; }

private:
  Shape              shape_;
  CountTable         positive_;
  std::vector<Entry> entries_;
};

/// Mass-weighted average of w^s over a box, via prefix tables.
double box_average(const WeightedGrid &grid, const BoxIdx &box, double s);

/// Uniform Lebesgue grid on [0, 1] carrying the exact cell averages of x^alpha.
WeightedGrid power_weight_grid(double alpha, std::size_t cells);

/// Uniform unit-mass-per-volume grid on [0, 1]^n with the given weight values.
WeightedGrid uniform_grid(std::vector<std::size_t> cells, std::vector<double> values);

/// Splits every cell into k equal sub-cells per axis.
WeightedGrid refine(const WeightedGrid &grid, unsigned k);

} // namespace sw
