#pragma once

// Brute-force reference implementations. They share only cell_power and psi
// with the library; every box sum is formed by direct loops over cells.

#include "strongweights/avg_point.hpp"
#include "strongweights/grid.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace sw::test {

struct NaiveMoments
{
  double mass = 0.0;
  double m1   = 0.0;
  double ms   = 0.0;
  bool   positive = false;
};

inline NaiveMoments naive_moments(const WeightedGrid &g, const BoxIdx &box, double s)
{
  NaiveMoments m;
  CellIndex    idx{};
  CellIndex    lo = box.lo, hi = box.hi;
  for (std::size_t i = box.rank; i < kMaxRank; ++i) {
    lo[i] = 0;
    hi[i] = 1;
  }
  for (idx[0] = lo[0]; idx[0] < hi[0]; ++idx[0])
    for (idx[1] = lo[1]; idx[1] < hi[1]; ++idx[1])
      for (idx[2] = lo[2]; idx[2] < hi[2]; ++idx[2]) {
        const std::size_t f  = g.shape.flat(idx);
        const double      mu = g.measure.mass[f];
        const double      w  = g.weight.values[f];
        m.mass += mu;
        m.m1 += mu * w;
        m.ms += mu * cell_power(w, s);
        m.positive = m.positive || mu > 0.0;
      }
  return m;
}

// Every box in lexicographic (lo0, hi0, lo1, hi1, ...) order.
template <typename F>
void for_each_box(const Shape &shape, F &&f)
{
  BoxIdx b;
  b.rank = shape.rank();
  auto rec = [&](auto &self, std::size_t axis) -> void {
    if (axis == shape.rank()) {
      f(b);
      return;
    }
    for (std::size_t lo = 0; lo < shape.extent(axis); ++lo)
      for (std::size_t hi = lo + 1; hi <= shape.extent(axis); ++hi) {
        b.lo[axis] = lo;
        b.hi[axis] = hi;
        self(self, axis + 1);
      }
  };
  rec(rec, 0);
}

struct NaiveResult
{
  double value = -std::numeric_limits<double>::infinity();
  BoxIdx argmax;
};

inline NaiveResult naive_characteristic(const WeightedGrid &g, ClassKind kind, double q)
{
  const double s = moment_exponent(kind, q);
  NaiveResult  best;
  bool         found = false;
  for_each_box(g.shape, [&](const BoxIdx &b) {
    const auto m = naive_moments(g, b, s);
    if (!m.positive)
      return;
    const double v = psi(kind, q, m.m1 / m.mass, m.ms / m.mass);
    if (!found || v > best.value) {
      best.value  = v;
      best.argmax = b;
      found       = true;
    }
  });
  return best;
}

// Grids whose every box moment is exact in double: masses k/16 (k = 0..16,
// some zero) and weights 2^j, j in [-4, 4] (even j when even is set).
inline WeightedGrid dyadic_grid(std::mt19937_64 &rng, std::size_t max_extent = 16, bool allow_2d = true,
                                bool even = false)
{
  std::uniform_int_distribution<std::size_t> ext(1, max_extent);
  std::uniform_int_distribution<int>         rank_d(1, allow_2d ? 2 : 1);
  std::uniform_int_distribution<int>         kd(0, 16);
  std::uniform_int_distribution<int>         jd(-4, 4);
  std::uniform_int_distribution<int>         zero(0, 5);

  std::vector<std::size_t> n(static_cast<std::size_t>(rank_d(rng)));
  for (auto &e : n)
    e = ext(rng);
  GridMeasure m;
  for (std::size_t e : n) {
    std::vector<double> b(e + 1);
    for (std::size_t i = 0; i <= e; ++i)
      b[i] = static_cast<double>(i);
    m.breakpoints.push_back(std::move(b));
  }
  const Shape shape(n);
  m.mass.resize(shape.size());
  WeightGrid w;
  w.values.resize(shape.size());
  for (std::size_t f = 0; f < shape.size(); ++f) {
    m.mass[f] = zero(rng) == 0 ? 0.0 : kd(rng) / 16.0;
    int j     = jd(rng);
    if (even)
      j = 2 * (j / 2);
    w.values[f] = std::ldexp(1.0, j);
  }
  m.mass[std::uniform_int_distribution<std::size_t>(0, shape.size() - 1)(rng)] = 1.0;
  return validate(std::move(m), std::move(w));
}

// Generic random grid: non-uniform breakpoints, masses and log-uniform weights.
inline WeightedGrid random_grid(std::mt19937_64 &rng, std::size_t max_extent, std::size_t max_rank,
                                double log_spread = 3.0)
{
  std::uniform_int_distribution<std::size_t> ext(1, max_extent);
  std::uniform_int_distribution<std::size_t> rank_d(1, max_rank);
  std::uniform_real_distribution<double>     unit(0.1, 1.0);
  std::uniform_real_distribution<double>     lw(-log_spread, log_spread);

  std::vector<std::size_t> n(rank_d(rng));
  for (auto &e : n)
    e = ext(rng);
  GridMeasure m;
  for (std::size_t e : n) {
    std::vector<double> b{0.0};
    for (std::size_t i = 0; i < e; ++i)
      b.push_back(b.back() + unit(rng));
    m.breakpoints.push_back(std::move(b));
  }
  const Shape shape(n);
  m.mass.resize(shape.size());
  WeightGrid w;
  w.values.resize(shape.size());
  for (std::size_t f = 0; f < shape.size(); ++f) {
    m.mass[f]   = unit(rng);
    w.values[f] = std::exp(lw(rng));
  }
  return validate(std::move(m), std::move(w));
}

inline WeightedGrid scaled(const WeightedGrid &g, double c)
{
  WeightGrid w = g.weight;
  for (auto &v : w.values)
    v *= c;
  w.power_alpha.reset();
  return validate(g.measure, std::move(w));
}

} // namespace sw::test
