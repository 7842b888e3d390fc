#include "strongweights/characteristics.hpp"

#include "strongweights/avg_point.hpp"
#include "strongweights/errors.hpp"
#include "strongweights/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace sw {

namespace {

struct Best
{
  double        value = -std::numeric_limits<double>::infinity();
  BoxIdx        box;
  bool          found = false;
  std::uint64_t scanned = 0;

  void offer(double v, const BoxIdx &b)
  {
    if (std::isnan(v))
      return;
    if (!found || v > value || (v == value && lex_less(b, box))) {
      value = v;
      box   = b;
      found = true;
    }
  }
};

// One worker's share of the enumeration. Boxes are visited in lexicographic
// order of (lo0, hi0, lo1, hi1, ...) restricted to leading indices
// lead = part (mod parts); the leading axis is axis 0 for rank >= 2 and the
// inner axis for rank 1.
class Scanner
{
public:
  Scanner(const MomentTables &tables, ClassKind kind, double q)
    : tables_(tables), kind_(kind), q_(q), s_(moment_exponent(kind, q)), shape_(tables.shape()),
      rank_(shape_.rank()), last_(rank_ - 1), m_last_(shape_.extent(last_)), mass_(tables.entry(0.0)),
      first_(tables.entry(1.0)), power_(tables.entry(s_)), slab_m_(m_last_ + 1), slab_w_(m_last_ + 1),
      slab_s_(m_last_ + 1), slab_pos_(m_last_ + 1), slab_over_(m_last_ + 1)
  {
  }

  Best run(unsigned part, unsigned parts)
  {
    part_  = part;
    parts_ = parts;
    best_  = Best{};
    box_   = BoxIdx{};
    box_.rank = rank_;
    outer(0);
    return best_;
  }

private:
  void outer(std::size_t axis)
  {
    if (axis == last_) {
      build_slabs();
      inner();
      return;
    }
    const std::size_t m = shape_.extent(axis);
    for (std::size_t a = 0; a < m; ++a) {
      if (axis == 0 && a % parts_ != part_)
        continue;
      for (std::size_t b = a + 1; b <= m; ++b) {
        box_.lo[axis] = a;
        box_.hi[axis] = b;
        outer(axis + 1);
      }
    }
  }

  // Collapse the outer-axis corners into 1-d prefix arrays along the last axis.
  void build_slabs()
  {
    const Shape      &padded  = mass_.sums.padded();
    const std::size_t corners = std::size_t{1} << last_;
    offsets_.assign(corners, 0);
    signs_.assign(corners, 1);
    for (std::size_t c = 0; c < corners; ++c) {
      CellIndex idx{};
      int       lows = 0;
      for (std::size_t i = 0; i < last_; ++i) {
        if (c & (std::size_t{1} << i)) {
          idx[i] = box_.hi[i];
        } else {
          idx[i] = box_.lo[i];
          ++lows;
        }
      }
      offsets_[c] = padded.flat(idx);
      signs_[c]   = lows % 2 == 0 ? 1 : -1;
    }
    collapse(mass_.sums.data(), slab_m_);
    collapse(first_.sums.data(), slab_w_);
    collapse(power_.sums.data(), slab_s_);
    collapse(tables_.positive().data(), slab_pos_);
    if (power_.any_overflow || first_.any_overflow) {
      collapse(power_.overflow.data(), slab_over_);
      if (first_.any_overflow) {
        std::vector<std::int64_t> extra(m_last_ + 1);
        collapse(first_.overflow.data(), extra);
        for (std::size_t j = 0; j <= m_last_; ++j)
          slab_over_[j] += extra[j];
      }
    } else {
      std::fill(slab_over_.begin(), slab_over_.end(), 0);
    }
  }

  template <typename T>
  void collapse(const std::vector<T> &table, std::vector<T> &slab) const
  {
    for (std::size_t j = 0; j <= m_last_; ++j) {
      T acc = 0;
      for (std::size_t c = 0; c < offsets_.size(); ++c)
        acc += signs_[c] > 0 ? table[offsets_[c] + j] : -table[offsets_[c] + j];
      slab[j] = acc;
    }
  }

  void inner()
  {
    const bool lead_here = rank_ == 1;
    for (std::size_t a = 0; a < m_last_; ++a) {
      if (lead_here && a % parts_ != part_)
        continue;
      for (std::size_t b = a + 1; b <= m_last_; ++b) {
        if (slab_pos_[b] - slab_pos_[a] == 0)
          continue;
        ++best_.scanned;
        double v;
        if (slab_over_[b] - slab_over_[a] > 0) {
          v = std::numeric_limits<double>::infinity();
        } else {
          const double m  = static_cast<double>(slab_m_[b] - slab_m_[a]);
          const double x1 = static_cast<double>(slab_w_[b] - slab_w_[a]) / m;
          const double x2 = static_cast<double>(slab_s_[b] - slab_s_[a]) / m;
          v               = psi(kind_, q_, x1, x2);
        }
        if (!best_.found || v > best_.value) {
          box_.lo[last_] = a;
          box_.hi[last_] = b;
          best_.offer(v, box_);
        }
      }
    }
  }

  const MomentTables        &tables_;
  ClassKind                  kind_;
  double                     q_;
  double                     s_;
  const Shape               &shape_;
  std::size_t                rank_;
  std::size_t                last_;
  std::size_t                m_last_;
  const MomentTables::Entry &mass_;
  const MomentTables::Entry &first_;
  const MomentTables::Entry &power_;

  std::vector<long double>  slab_m_, slab_w_, slab_s_;
  std::vector<std::int64_t> slab_pos_, slab_over_;
  std::vector<std::size_t>  offsets_;
  std::vector<int>          signs_;

  unsigned part_  = 0;
  unsigned parts_ = 1;
  Best     best_;
  BoxIdx   box_;
};

void check_exponent(ClassKind kind, double q)
{
  if (!std::isfinite(q))
    throw PreconditionError("exponent must be finite");
  if (kind == ClassKind::MuckenhouptA && !(q > 1.0))
    throw PreconditionError("A-class exponent must exceed 1, got " + fmt_exact(q));
  if (kind == ClassKind::ReverseHolder && !(q >= 1.0))
    throw PreconditionError("RH-class exponent must be at least 1, got " + fmt_exact(q));
}

} // namespace

CharacteristicReport characteristic(const WeightedGrid &grid, ClassKind kind, double q, const ScanOptions &opts)
{
  check_exponent(kind, q);
  const double       s      = moment_exponent(kind, q);
  const double       exps[] = {s};
  const MomentTables tables(grid, exps);

  const unsigned    parts = std::max(1u, opts.partitions);
  std::vector<Best> results(parts);
  if (parts == 1) {
    results[0] = Scanner(tables, kind, q).run(0, 1);
  } else {
    std::vector<std::thread> workers;
    for (unsigned k = 0; k < parts; ++k)
      workers.emplace_back([&, k] { results[k] = Scanner(tables, kind, q).run(k, parts); });
    for (auto &w : workers)
      w.join();
  }

  Best total;
  for (const auto &r : results) {
    total.scanned += r.scanned;
    if (r.found)
      total.offer(r.value, r.box);
  }
  // validate() guarantees positive total mass, so at least one box is scanned.
  return CharacteristicReport{kind, q, total.value, total.box, total.scanned};
}

CharacteristicReport ap_characteristic(const WeightedGrid &grid, PParam p, const ScanOptions &opts)
{
  return characteristic(grid, ClassKind::MuckenhouptA, p.p(), opts);
}

CharacteristicReport rh_characteristic(const WeightedGrid &grid, PParam p, const ScanOptions &opts)
{
  return characteristic(grid, ClassKind::ReverseHolder, p.p(), opts);
}

std::vector<QScanEntry> q_scan(const WeightedGrid &grid, ClassKind kind, std::span<const double> q_list,
                               const ScanOptions &opts)
{
  std::vector<QScanEntry> out;
  out.reserve(q_list.size());
  for (double q : q_list) {
    QScanEntry e{q, std::nullopt, std::nullopt, {}};
    try {
      const auto r = characteristic(grid, kind, q, opts);
      e.value      = r.value;
      e.argmax     = r.argmax;
    } catch (const PreconditionError &err) {
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

} // namespace sw
