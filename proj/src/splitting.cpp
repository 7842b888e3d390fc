#include "strongweights/splitting.hpp"

#include "strongweights/errors.hpp"
#include "strongweights/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace sw {

namespace {

template <typename F>
void for_each_cell(const Shape &shape, const BoxIdx &box, F &&f)
{
  CellIndex idx{};
  CellIndex lo = box.lo, hi = box.hi;
  for (std::size_t i = box.rank; i < kMaxRank; ++i) {
    lo[i] = 0;
    hi[i] = 1;
  }
  for (idx[0] = lo[0]; idx[0] < hi[0]; ++idx[0])
    for (idx[1] = lo[1]; idx[1] < hi[1]; ++idx[1])
      for (idx[2] = lo[2]; idx[2] < hi[2]; ++idx[2])
        f(shape.flat(idx));
}

std::string path_string(const std::vector<int> &path)
{
  if (path.empty())
    return "root";
  std::string s = "root";
  for (int b : path)
    s += b == 0 ? "/0" : "/1";
  return s;
}

} // namespace

SplitConfig SplitConfig::with_defaults(ClassKind kind, PParam p, double Q, std::size_t levels)
{
  SplitConfig c;
  c.kind   = kind;
  c.p      = p;
  c.Q      = Q;
  c.Q1     = 1.05 * Q;
  c.c      = 0.2;
  c.levels = levels;
  return c;
}

void SplitConfig::validate() const
{
  if (!(Q > 1.0) || !std::isfinite(Q))
    throw PreconditionError("Q must exceed 1, got " + fmt_exact(Q));
  if (!(Q1 > Q) || !std::isfinite(Q1))
    throw PreconditionError("Q1 must exceed Q, got Q1 = " + fmt_exact(Q1) + ", Q = " + fmt_exact(Q));
  if (!(c > 0.0 && c <= 0.5))
    throw PreconditionError("ratio constant c must lie in (0, 1/2], got " + fmt_exact(c));
  if (segment_samples < 2)
    throw PreconditionError("segment_samples must be at least 2");
}

std::size_t choose_direction(std::span<const double> edges)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i] > edges[best])
      best = i;
  return best;
}

double segment_max(const AvgPoint &a, const AvgPoint &b, ClassKind kind, PParam p, std::size_t samples)
{
  samples  = std::max<std::size_t>(samples, 2);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double lambda = static_cast<double>(k) / static_cast<double>(samples - 1);
    const double v      = psi(kind, p, lerp(a, b, lambda));
    if (std::isnan(v))
      return std::numeric_limits<double>::infinity();
    m = std::max(m, v);
  }
  return m;
}

SplitChoice choose_position(const MomentTables &tables, const BoxIdx &box, std::size_t axis,
                            const SplitConfig &config)
{
  check_box(tables.shape(), box);
  if (axis >= box.rank || box.hi[axis] - box.lo[axis] < 2)
    throw PreconditionError("box " + to_string(box) + " has fewer than 2 cells along axis " + std::to_string(axis));

  const double s     = moment_exponent(config.kind, config.p.p());
  const double total = tables.mass(box);

  struct Option
  {
    std::size_t k;
    double      ratio;
  };
  std::vector<Option> options;
  for (std::size_t k = box.lo[axis] + 1; k < box.hi[axis]; ++k) {
    BoxIdx first  = box;
    first.hi[axis] = k;
    options.push_back({k, tables.mass(first) / total});
  }
  std::stable_sort(options.begin(), options.end(), [](const Option &a, const Option &b) {
    return std::abs(a.ratio - 0.5) < std::abs(b.ratio - 0.5);
  });

  const auto evaluate = [&](const Option &o) {
    BoxIdx first = box, second = box;
    first.hi[axis]  = o.k;
    second.lo[axis] = o.k;
    SplitChoice ch{axis, o.k, o.ratio, 0.0, {}, {}};
    ch.first       = {tables.average(first, 1.0), tables.average(first, s)};
    ch.second      = {tables.average(second, 1.0), tables.average(second, s)};
    ch.segment_max = segment_max(ch.first, ch.second, config.kind, config.p, config.segment_samples);
    return ch;
  };

  for (const auto &o : options) {
    if (!(o.ratio > config.c && o.ratio < 1.0 - config.c))
      break;
    SplitChoice ch = evaluate(o);
    if (ch.segment_max <= config.Q1)
      return ch;
  }

  const Option &best    = options.front();
  double        seg_max = std::numeric_limits<double>::quiet_NaN();
  if (best.ratio > 0.0 && best.ratio < 1.0)
    seg_max = evaluate(best).segment_max;
  throw InfeasibleSplit("no admissible split of box " + to_string(box) + " along axis " + std::to_string(axis) +
                            ": best ratio " + fmt_short(best.ratio) + ", its segment max " + fmt_short(seg_max) +
                            " (c = " + fmt_short(config.c) + ", Q1 = " + fmt_short(config.Q1) + ")",
                        best.ratio, seg_max);
}

SplitChoice choose_position(const WeightedGrid &grid, const BoxIdx &box, std::size_t axis, const SplitConfig &config)
{
  const double       exps[] = {moment_exponent(config.kind, config.p.p())};
  const MomentTables tables(grid, exps);
  return choose_position(tables, box, axis, config);
}

SplitTree build_tree(const WeightedGrid &grid, const BoxIdx &root, const SplitConfig &config)
{
  config.validate();
  check_box(grid.shape, root);
  const double       s      = moment_exponent(config.kind, config.p.p());
  const double       exps[] = {s};
  const MomentTables tables(grid, exps);
  if (!tables.has_mass(root))
    throw ZeroMeasureBox("root box " + to_string(root) + " has zero mass");

  SplitTree tree{config, s, {}, {}};
  const auto make_node = [&](const BoxIdx &b, std::size_t level, std::int64_t parent) {
    SplitNode n;
    n.box      = b;
    n.x        = {tables.average(b, 1.0), tables.average(b, s)};
    n.mass     = tables.mass(b);
    n.level    = level;
    n.diameter = diameter(grid.measure, b);
    n.parent   = parent;
    return n;
  };
  tree.nodes.push_back(make_node(root, 0, -1));

  std::vector<std::size_t> frontier{0};
  for (std::size_t level = 0; level < config.levels; ++level) {
    std::vector<std::size_t> next;
    next.reserve(2 * frontier.size());
    for (std::size_t id : frontier) {
      const BoxIdx box   = tree.nodes[id].box;
      auto         edges = edge_lengths(grid.measure, box);
      for (std::size_t i = 0; i < box.rank; ++i)
        if (box.hi[i] - box.lo[i] < 2)
          edges[i] = -1.0;
      try {
        if (std::all_of(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(box.rank),
                        [](double e) { return e < 0.0; }))
          throw InfeasibleSplit("box " + to_string(box) + " is a single cell and cannot be split",
                                std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
        const std::size_t axis = choose_direction(std::span<const double>(edges.data(), box.rank));
        SplitChoice       ch   = choose_position(tables, box, axis, config);

        BoxIdx first = box, second = box;
        first.hi[axis]  = ch.breakpoint;
        second.lo[axis] = ch.breakpoint;
        const auto a    = static_cast<std::int64_t>(tree.nodes.size());
        tree.nodes.push_back(make_node(first, level + 1, static_cast<std::int64_t>(id)));
        tree.nodes.push_back(make_node(second, level + 1, static_cast<std::int64_t>(id)));
        tree.nodes[id].children[0] = a;
        tree.nodes[id].children[1] = a + 1;
        tree.nodes[id].split       = ch;
        next.push_back(static_cast<std::size_t>(a));
        next.push_back(static_cast<std::size_t>(a + 1));
      } catch (InfeasibleSplit &e) {
        std::vector<int> path;
        for (std::int64_t n = static_cast<std::int64_t>(id); tree.nodes[n].parent >= 0; n = tree.nodes[n].parent)
          path.push_back(tree.nodes[tree.nodes[n].parent].children[0] == n ? 0 : 1);
        std::reverse(path.begin(), path.end());
        InfeasibleSplit err(std::string(e.what()) + " at node " + path_string(path), e.best_ratio,
                            e.best_segment_max);
        err.node_path = std::move(path);
        throw err;
      }
    }
    frontier = std::move(next);
  }

  // Per-level diagnostics.
  double ref1 = 0.0, ref2 = 0.0;
  for_each_cell(grid.shape, root, [&](std::size_t f) {
    ref1 += grid.measure.mass[f] * grid.weight.values[f];
    ref2 += grid.measure.mass[f] * cell_power(grid.weight.values[f], s);
  });
  std::size_t first_id = 0;
  for (std::size_t level = 0; level <= config.levels; ++level) {
    LevelDiagnostics d{level, {}, 0.0, 0.0, 0.0};
    const std::size_t count = std::size_t{1} << level;
    double            l1 = 0.0, l2 = 0.0;
    for (std::size_t id = first_id; id < first_id + count; ++id) {
      const SplitNode &n = tree.nodes[id];
      d.nodes.push_back(id);
      d.max_diameter = std::max(d.max_diameter, n.diameter);
      for_each_cell(grid.shape, n.box, [&](std::size_t f) {
        const double m = grid.measure.mass[f];
        const double w = grid.weight.values[f];
        l1 += m * std::abs(n.x.x1 - w);
        l2 += m * std::abs(n.x.x2 - cell_power(w, s));
      });
    }
    d.l1_x1 = l1 / ref1;
    d.l1_x2 = l2 / ref2;
    tree.levels.push_back(std::move(d));
    first_id += count;
  }
  return tree;
}

ChainReport chain_report(const SplitTree &tree, const WeightedGrid &grid, double r, const BellmanCandidate &candidate)
{
  if (tree.nodes.empty())
    throw PreconditionError("empty split tree");
  const SplitNode &root = tree.nodes.front();
  ChainReport      rep{r, {}, box_average(grid, root.box, r)};
  for (const auto &lvl : tree.levels) {
    double sum = 0.0;
    for (std::size_t id : lvl.nodes) {
      const SplitNode &n = tree.nodes[id];
      sum += n.mass / root.mass * candidate(n.x);
    }
    rep.sums.push_back(sum);
  }
  return rep;
}

void write_trace_csv(std::ostream &out, const SplitTree &tree, const GridMeasure &measure)
{
  const std::size_t rank = tree.nodes.empty() ? 0 : tree.nodes.front().box.rank;
  out << "node,parent,level";
  for (std::size_t i = 0; i < rank; ++i)
    out << ",lo" << i << ",hi" << i;
  out << ",axis,coordinate,ratio,x1,x2,segment_max,diameter\n";
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const SplitNode &n = tree.nodes[id];
    out << id << ',' << n.parent << ',' << n.level;
    for (std::size_t i = 0; i < rank; ++i)
      out << ',' << n.box.lo[i] << ',' << n.box.hi[i];
    if (n.split)
      out << ',' << n.split->axis << ',' << fmt_exact(measure.breakpoints[n.split->axis][n.split->breakpoint]) << ','
          << fmt_exact(n.split->ratio);
    else
      out << ",,,";
    out << ',' << fmt_exact(n.x.x1) << ',' << fmt_exact(n.x.x2) << ',';
    if (n.split)
      out << fmt_exact(n.split->segment_max);
    out << ',' << fmt_exact(n.diameter) << '\n';
  }
}

} // namespace sw
