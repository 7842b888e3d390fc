#include "strongweights/grid.hpp"

#include "strongweights/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sw {

namespace {

std::string num(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Shape padded_shape(const Shape &cells)
{
  std::vector<std::size_t> ext(cells.rank());
  for (std::size_t i = 0; i < cells.rank(); ++i)
    ext[i] = cells.extent(i) + 1;
  return Shape(std::move(ext));
}

CellIndex shifted(const CellIndex &idx)
{
  CellIndex out{};
  for (std::size_t i = 0; i < kMaxRank; ++i)
    out[i] = idx[i] + 1;
  return out;
}

std::size_t stride(const Shape &shape, std::size_t axis)
{
  std::size_t s = 1;
  for (std::size_t i = axis + 1; i < shape.rank(); ++i)
    s *= shape.extent(i);
  return s;
}

// Inclusion-exclusion over the 2^rank corners of a box in a padded table.
template <typename T, typename Acc>
Acc corner_sum(const Shape &padded, const std::vector<T> &data, const BoxIdx &box)
{
  Acc               total   = 0;
  const std::size_t corners = std::size_t{1} << box.rank;
  for (std::size_t c = 0; c < corners; ++c) {
    CellIndex idx{};
    int       lows = 0;
    for (std::size_t i = 0; i < box.rank; ++i) {
      if (c & (std::size_t{1} << i)) {
        idx[i] = box.hi[i];
      } else {
        idx[i] = box.lo[i];
        ++lows;
      }
    }
    const T v = data[padded.flat(idx)];
    if (lows % 2 == 0)
      total += v;
    else
      total -= v;
  }
  return total;
}

std::vector<double> uniform_breakpoints(std::size_t cells)
{
  std::vector<double> bp(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j)
    bp[j] = static_cast<double>(j) / static_cast<double>(cells);
  return bp;
}

} // namespace

Shape::Shape(std::vector<std::size_t> extents)
{
  if (extents.empty() || extents.size() > kMaxRank)
    throw PreconditionError("grid rank must be between 1 and 3, got " + std::to_string(extents.size()));
  rank_ = extents.size();
  size_ = 1;
  for (std::size_t i = 0; i < rank_; ++i) {
    if (extents[i] == 0)
      throw PreconditionError("axis " + std::to_string(i) + " has no cells");
    extent_[i] = extents[i];
    size_ *= extents[i];
  }
}

std::size_t Shape::flat(const CellIndex &idx) const
{
  std::size_t f = 0;
  for (std::size_t i = 0; i < rank_; ++i)
    f = f * extent_[i] + idx[i];
  return f;
}

CellIndex Shape::unflat(std::size_t flat) const
{
  CellIndex idx{};
  for (std::size_t i = rank_; i-- > 0;) {
    idx[i] = flat % extent_[i];
    flat /= extent_[i];
  }
  return idx;
}

std::string to_string(const CellIndex &idx, std::size_t rank)
{
  std::string s = "(";
  for (std::size_t i = 0; i < rank; ++i) {
    if (i)
      s += ",";
    s += std::to_string(idx[i]);
  }
  return s + ")";
}

BoxIdx BoxIdx::full(const Shape &shape)
{
  BoxIdx b;
  b.rank = shape.rank();
  for (std::size_t i = 0; i < b.rank; ++i)
    b.hi[i] = shape.extent(i);
  return b;
}

std::size_t BoxIdx::cells() const
{
  std::size_t n = 1;
  for (std::size_t i = 0; i < rank; ++i)
    n *= hi[i] - lo[i];
  return n;
}

bool BoxIdx::contains(const CellIndex &idx) const
{
  for (std::size_t i = 0; i < rank; ++i)
    if (idx[i] < lo[i] || idx[i] >= hi[i])
      return false;
  return true;
}

bool lex_less(const BoxIdx &a, const BoxIdx &b)
{
  for (std::size_t i = 0; i < std::min(a.rank, b.rank); ++i) {
    if (a.lo[i] != b.lo[i])
      return a.lo[i] < b.lo[i];
    if (a.hi[i] != b.hi[i])
      return a.hi[i] < b.hi[i];
  }
  return a.rank < b.rank;
}

std::string to_string(const BoxIdx &box)
{
  std::string s;
  for (std::size_t i = 0; i < box.rank; ++i) {
    if (i)
      s += "x";
    s += "[" + std::to_string(box.lo[i]) + "," + std::to_string(box.hi[i]) + ")";
  }
  return s;
}

void check_box(const Shape &shape, const BoxIdx &box)
{
  if (box.rank != shape.rank())
    throw PreconditionError("box rank " + std::to_string(box.rank) + " does not match grid rank " +
                            std::to_string(shape.rank()));
  for (std::size_t i = 0; i < box.rank; ++i)
    if (!(box.lo[i] < box.hi[i]) || box.hi[i] > shape.extent(i))
      throw PreconditionError("box " + to_string(box) + " is empty or exceeds axis " + std::to_string(i));
}

Shape GridMeasure::shape() const
{
  std::vector<std::size_t> ext;
  for (const auto &bp : breakpoints)
    ext.push_back(bp.size() < 2 ? 0 : bp.size() - 1);
  return Shape(std::move(ext));
}

double GridMeasure::total_mass() const
{
  long double t = 0;
  for (double m : mass)
    t += m;
  return static_cast<double>(t);
}

WeightedGrid validate(GridMeasure measure, WeightGrid weight)
{
  if (measure.breakpoints.empty() || measure.breakpoints.size() > kMaxRank)
    throw PreconditionError("grid rank must be between 1 and 3, got " +
                            std::to_string(measure.breakpoints.size()));
  for (std::size_t a = 0; a < measure.breakpoints.size(); ++a) {
    const auto &bp = measure.breakpoints[a];
    if (bp.size() < 2)
      throw PreconditionError("axis " + std::to_string(a) + " needs at least two breakpoints");
    for (std::size_t k = 0; k < bp.size(); ++k) {
      if (!std::isfinite(bp[k]))
        throw PreconditionError("axis " + std::to_string(a) + ": non-finite breakpoint at index " +
                                std::to_string(k));
      if (k > 0 && !(bp[k] > bp[k - 1]))
        throw PreconditionError("axis " + std::to_string(a) +
                                ": breakpoints not strictly increasing at index " + std::to_string(k));
    }
  }
  const Shape shape = measure.shape();
  if (measure.mass.size() != shape.size())
    throw PreconditionError("mass array has " + std::to_string(measure.mass.size()) + " entries, expected " +
                            std::to_string(shape.size()));
  for (std::size_t c = 0; c < shape.size(); ++c) {
    const double m = measure.mass[c];
    if (!std::isfinite(m))
      throw PreconditionError("non-finite mass at cell " + to_string(shape.unflat(c), shape.rank()));
    if (m < 0.0)
      throw PreconditionError("negative mass at cell " + to_string(shape.unflat(c), shape.rank()));
  }
  if (!(measure.total_mass() > 0.0))
    throw PreconditionError("total mass must be positive");
  if (weight.values.size() != shape.size())
    throw PreconditionError("weight array has " + std::to_string(weight.values.size()) +
                            " entries, expected " + std::to_string(shape.size()));
  for (std::size_t c = 0; c < shape.size(); ++c) {
    const double w = weight.values[c];
    if (!(w > 0.0) || !std::isfinite(w))
      throw PreconditionError("non-positive weight at cell " + to_string(shape.unflat(c), shape.rank()) +
                              " (value " + num(w) + ")");
  }
  return WeightedGrid{std::move(measure), std::move(weight), shape};
}

std::array<double, kMaxRank> edge_lengths(const GridMeasure &measure, const BoxIdx &box)
{
  std::array<double, kMaxRank> e{};
  for (std::size_t i = 0; i < box.rank; ++i)
    e[i] = measure.breakpoints[i][box.hi[i]] - measure.breakpoints[i][box.lo[i]];
  return e;
}

double diameter(const GridMeasure &measure, const BoxIdx &box)
{
  double s = 0.0;
  for (double e : edge_lengths(measure, box))
    s += e * e;
  return std::sqrt(s);
}

double cell_power(double w, double s)
{
  if (s == 0.0)
    return 1.0;
  if (s == 1.0)
    return w;
  return std::pow(w, s);
}

PrefixTable::PrefixTable(const Shape &cells, std::span<const double> cell_values)
  : padded_(padded_shape(cells)), data_(padded_.size(), 0.0L)
{
  for (std::size_t c = 0; c < cells.size(); ++c)
    data_[padded_.flat(shifted(cells.unflat(c)))] = cell_values[c];

  // Neumaier running sums along every line of every axis.
  for (std::size_t axis = 0; axis < padded_.rank(); ++axis) {
    const std::size_t st  = stride(padded_, axis);
    const std::size_t len = padded_.extent(axis);
    for (std::size_t start = 0; start < padded_.size(); ++start) {
      if ((start / st) % len != 0)
        continue;
      long double sum = 0.0L, comp = 0.0L;
      for (std::size_t k = 0; k < len; ++k) {
        long double      &slot = data_[start + k * st];
        const long double x    = slot;
        const long double t    = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
          comp += (sum - t) + x;
        else
          comp += (x - t) + sum;
        sum  = t;
        slot = sum + comp;
      }
    }
  }
}

double PrefixTable::box_sum(const BoxIdx &box) const
{
  return static_cast<double>(corner_sum<long double, long double>(padded_, data_, box));
}

CountTable::CountTable(const Shape &cells, std::span<const std::uint8_t> flags)
  : padded_(padded_shape(cells)), data_(padded_.size(), 0)
{
  for (std::size_t c = 0; c < cells.size(); ++c)
    data_[padded_.flat(shifted(cells.unflat(c)))] = flags[c] ? 1 : 0;
  for (std::size_t axis = 0; axis < padded_.rank(); ++axis) {
    const std::size_t st  = stride(padded_, axis);
    const std::size_t len = padded_.extent(axis);
    for (std::size_t start = 0; start < padded_.size(); ++start) {
      if ((start / st) % len != 0)
        continue;
      for (std::size_t k = 1; k < len; ++k)
        data_[start + k * st] += data_[start + (k - 1) * st];
    }
  }
}

std::int64_t CountTable::box_count(const BoxIdx &box) const
{
  return corner_sum<std::int64_t, std::int64_t>(padded_, data_, box);
}

MomentTables::MomentTables(const WeightedGrid &grid, std::span<const double> exponents) : shape_(grid.shape)
{
  std::vector<double> exps{0.0, 1.0};
  for (double s : exponents) {
    if (!std::isfinite(s))
      throw PreconditionError("moment exponent must be finite");
    if (std::find(exps.begin(), exps.end(), s) == exps.end())
      exps.push_back(s);
  }

  std::vector<std::uint8_t> positive(shape_.size());
  for (std::size_t c = 0; c < shape_.size(); ++c)
    positive[c] = grid.measure.mass[c] > 0.0;
  positive_ = CountTable(shape_, positive);

  std::vector<double>       cell(shape_.size());
  std::vector<std::uint8_t> over(shape_.size());
  for (double s : exps) {
    bool any = false;
    for (std::size_t c = 0; c < shape_.size(); ++c) {
      const double m = grid.measure.mass[c];
      const double v = m == 0.0 ? 0.0 : m * cell_power(grid.weight.values[c], s);
      over[c]        = !std::isfinite(v);
      cell[c]        = over[c] ? 0.0 : v;
      any            = any || over[c];
    }
    entries_.push_back(Entry{s, PrefixTable(shape_, cell), CountTable(shape_, over), any});
  }
}

const MomentTables::Entry &MomentTables::entry(double s) const
{
  for (const auto &e : entries_)
    if (e.exponent == s)
      return e;
  throw PreconditionError("no prefix table for exponent " + num(s));
}

double MomentTables::moment(const BoxIdx &box, double s) const
{
  const Entry &e = entry(s);
  if (e.any_overflow && e.overflow.box_count(box) > 0)
    return std::numeric_limits<double>::infinity();
  const double v = e.sums.box_sum(box);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

double MomentTables::average(const BoxIdx &box, double s) const
{
  check_box(shape_, box);
  if (!has_mass(box))
    throw ZeroMeasureBox("box " + to_string(box) + " has zero measure");
  return moment(box, s) / mass(box);
}

double box_average(const WeightedGrid &grid, const BoxIdx &box, double s)
{
  const double        exps[] = {s};
  const MomentTables tables(grid, exps);
  return tables.average(box, s);
}

WeightedGrid power_weight_grid(double alpha, std::size_t cells)
{
  if (!(alpha > -1.0) || !std::isfinite(alpha))
    throw PreconditionError("power weight x^alpha is not integrable at 0 for alpha = " + num(alpha));
  if (cells == 0)
    throw PreconditionError("power weight grid needs at least one cell");

  GridMeasure measure;
  measure.breakpoints.push_back(uniform_breakpoints(cells));
  measure.mass.assign(cells, 1.0 / static_cast<double>(cells));

  const auto &x = measure.breakpoints[0];
  WeightGrid  weight;
  weight.values.resize(cells);
  const double e = alpha + 1.0;
  for (std::size_t j = 0; j < cells; ++j)
    weight.values[j] = (std::pow(x[j + 1], e) - std::pow(x[j], e)) / (e * (x[j + 1] - x[j]));
  weight.power_alpha = alpha;
  return validate(std::move(measure), std::move(weight));
}

WeightedGrid uniform_grid(std::vector<std::size_t> cells, std::vector<double> values)
{
  const Shape shape(cells);
  GridMeasure measure;
  for (std::size_t m : cells)
    measure.breakpoints.push_back(uniform_breakpoints(m));
  measure.mass.assign(shape.size(), 1.0 / static_cast<double>(shape.size()));
  return validate(std::move(measure), WeightGrid{std::move(values), std::nullopt});
}

WeightedGrid refine(const WeightedGrid &grid, unsigned k)
{
  if (k < 2)
    throw PreconditionError("refinement factor must be at least 2");
  if (grid.weight.power_alpha)
    return power_weight_grid(*grid.weight.power_alpha, grid.shape.size() * k);

  const Shape &coarse = grid.shape;
  GridMeasure  measure;
  std::vector<std::size_t> ext;
  for (std::size_t a = 0; a < coarse.rank(); ++a) {
    const auto         &bp = grid.measure.breakpoints[a];
    std::vector<double> fine;
    for (std::size_t j = 0; j + 1 < bp.size(); ++j)
      for (unsigned s = 0; s < k; ++s)
        fine.push_back(bp[j] + (bp[j + 1] - bp[j]) * s / k);
    fine.push_back(bp.back());
    measure.breakpoints.push_back(std::move(fine));
    ext.push_back(coarse.extent(a) * k);
  }
  const Shape fine_shape(ext);
  double      split = 1.0;
  for (std::size_t a = 0; a < coarse.rank(); ++a)
    split *= k;

  measure.mass.resize(fine_shape.size());
  WeightGrid weight;
  weight.values.resize(fine_shape.size());
  for (std::size_t f = 0; f < fine_shape.size(); ++f) {
    CellIndex idx = fine_shape.unflat(f);
    for (std::size_t a = 0; a < coarse.rank(); ++a)
      idx[a] /= k;
    const std::size_t c = coarse.flat(idx);
    measure.mass[f]     = grid.measure.mass[c] / split;
    weight.values[f]    = grid.weight.values[c];
  }
  return validate(std::move(measure), std::move(weight));
}

} // namespace sw
