// Acceptance gate: prints one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance --only K   run criterion K (1..9)
//
// Exit status is non-zero when any criterion that ran failed.

#include "strongweights/bellman.hpp"
#include "strongweights/candidate.hpp"
#include "strongweights/characteristics.hpp"
#include "strongweights/exponents.hpp"
#include "strongweights/format.hpp"
#include "strongweights/grid.hpp"
#include "strongweights/splitting.hpp"

#include "../support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace sw;

namespace {

struct Outcome
{
  bool        pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string join(const std::vector<double> &v, int digits = 7)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? " " : "") + fmt_short(v[i], digits);
  return s;
}

bool strictly_increasing(const std::vector<double> &v)
{
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1]))
      return false;
  return true;
}

double last_change(const std::vector<double> &v)
{
  return std::abs(v.back() - v[v.size() - 2]) / std::abs(v[v.size() - 2]);
}

const std::vector<std::size_t> kSizes{256, 1024, 4096, 16384};

std::vector<double> power_sequence(double alpha, ClassKind kind, double q)
{
  std::vector<double> out;
  for (std::size_t n : kSizes)
    out.push_back(characteristic(power_weight_grid(alpha, n), kind, q, ScanOptions{4}).value);
  return out;
}

// ---------------------------------------------------------------------------

Outcome ac1()
{
  struct Case
  {
    ClassKind kind;
    double    Q, a, rh, tol;
  };
  const Case cases[] = {
      {ClassKind::MuckenhouptA, 4.0 / 3.0, 1.5, 2.0, 1e-9},
      {ClassKind::MuckenhouptA, 2.0, 1.0 + std::sqrt(0.5), std::sqrt(2.0), 1e-9},
      {ClassKind::ReverseHolder, 2.0 / std::sqrt(3.0), 2.0, 3.0, 1e-6},
  };
  bool               ok = true;
  std::ostringstream d;
  for (const auto &c : cases) {
    const auto       t0 = Clock::now();
    const SharpRange r  = sharp_range(c.kind, PParam(2.0), c.Q);
    const double     dt = seconds_since(t0);
    const double     ea = std::abs(r.a_lower - c.a), er = std::abs(r.rh_upper - c.rh);
    ok = ok && ea <= c.tol && er <= c.tol && dt < 1e-3;
    d << to_string(c.kind) << " Q=" << fmt_short(c.Q, 6) << ": a_lower=" << fmt_short(r.a_lower, 12)
      << " rh_upper=" << fmt_short(r.rh_upper, 12) << " (err " << fmt_short(std::max(ea, er), 2) << ", "
      << fmt_short(dt * 1e6, 3) << " us); ";
  }
  return {ok, d.str()};
}

// True when no double solves the implicit equation better than s: t lies
// between the values at the neighbours of s.
bool pinned(ClassKind kind, PParam p, double s, double t)
{
  double       v[2];
  const double n[2] = {std::nextafter(s, -INFINITY), std::nextafter(s, INFINITY)};
  for (int i = 0; i < 2; ++i) {
    try {
      v[i] = implicit_value(kind, p, n[i]);
    } catch (const std::exception &) {
      v[i] = 0.0;
    }
  }
  const double r = std::abs(implicit_value(kind, p, s) - t);
  return std::min(v[0], v[1]) <= t + r && t - r <= std::max(v[0], v[1]) &&
         r <= std::max(std::abs(v[0] - t), std::abs(v[1] - t));
}

struct Sample
{
  ClassKind kind;
  Branch    branch;
  PParam    p;
  double    Q;
};

Sample draw(std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> dp(1.1, 10.0);
  std::uniform_real_distribution<double> du(0.0, 1.0);
  const ClassKind kind = du(rng) < 0.5 ? ClassKind::MuckenhouptA : ClassKind::ReverseHolder;
  const Branch    br   = du(rng) < 0.5 ? Branch::Plus : Branch::Minus;
  const PParam    p(dp(rng));
  // Q in (1, 100], log-uniform.
  const double Q = std::exp((1.0 - du(rng)) * std::log(100.0));
  return {kind, br, p, Q};
}

// Tally of cases over a threshold; pinned ones are at the double-precision limit.
struct Tally
{
  int         over = 0, pinned = 0;
  double      worst = 0.0, worst_unpinned = 0.0;
  std::string where;

  void add(double err, double limit, const Sample &c, bool at_limit)
  {
    worst = std::max(worst, err);
    if (err <= limit)
      return;
    ++over;
    if (at_limit) {
      ++pinned;
      if (where.empty())
        where = std::string(to_string(c.kind)) + "/" + std::string(to_string(c.branch)) + " p=" + fmt_short(c.p.p(), 4) +
                " Q=" + fmt_short(c.Q, 4);
    } else {
      worst_unpinned = std::max(worst_unpinned, err);
    }
  }

  std::string describe(int total, const char *what, double dt) const
  {
    std::string d = "max " + std::string(what) + " " + fmt_short(worst, 3) + " over " + std::to_string(total) +
                    " cases in " + fmt_short(dt, 3) + " s";
    if (over)
      d += "; " + std::to_string(over) + " over the limit, " + std::to_string(pinned) +
           " of them with the root pinned between adjacent doubles (first: " + where + ")";
    return d;
  }
};

Outcome ac2()
{
  std::mt19937_64 rng(2);
  Tally           tally;
  const auto      t0 = Clock::now();
  for (int i = 0; i < 10000; ++i) {
    const Sample c = draw(rng);
    const double s = solve_branch(c.kind, c.p, 1.0 / c.Q, c.branch);
    const double r = std::abs(implicit_value(c.kind, c.p, s) - 1.0 / c.Q);
    tally.add(r, 1e-10, c, r > 1e-10 && pinned(c.kind, c.p, s, 1.0 / c.Q));
  }
  const double dt = seconds_since(t0);
  return {tally.over == 0 && dt < 1.0, tally.describe(10000, "residual", dt)};
}

Outcome ac3()
{
  std::mt19937_64 rng(3);
  Tally           tally;
  const auto      t0 = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    const Sample c     = draw(rng);
    const double alpha = extremal_alpha(c.kind, c.p, c.Q, c.branch);
    double       err   = INFINITY;
    try {
      err = std::abs(analytic_power_characteristic(c.kind, c.p, alpha) - c.Q) / c.Q;
    } catch (const std::exception &) {
    }
    tally.add(err, 1e-9, c, err > 1e-9 && pinned(c.kind, c.p, -alpha, 1.0 / c.Q));
  }
  const double dt = seconds_since(t0);
  return {tally.over == 0 && dt < 1.0, tally.describe(1000, "relative error", dt)};
}

Outcome ac4()
{
  std::mt19937_64 rng(4);
  int             mismatches = 0;
  const auto      t0         = Clock::now();
  for (int i = 0; i < 200; ++i) {
    const bool      even = i % 4 >= 2;
    const auto      g    = test::dyadic_grid(rng, 16, true, even);
    const ClassKind kind = i % 2 ? ClassKind::ReverseHolder : ClassKind::MuckenhouptA;
    const double    q    = even ? 3.0 : 2.0;
    const auto      fast = characteristic(g, kind, q);
    const auto      slow = test::naive_characteristic(g, kind, q);
    if (!(fast.value == slow.value) || !(fast.argmax == slow.argmax))
      ++mismatches;
  }
  const double dt = seconds_since(t0);
  return {mismatches == 0 && dt < 30.0,
          std::to_string(mismatches) + " mismatches in 200 grids, " + fmt_short(dt, 3) + " s"};
}

Outcome ac5()
{
  const auto   t0 = Clock::now();
  const auto   a  = power_sequence(0.5, ClassKind::MuckenhouptA, 2.0);
  const double rh = characteristic(power_weight_grid(1.0, 4096), ClassKind::ReverseHolder, 2.0, ScanOptions{4}).value;
  const double dt = seconds_since(t0);
  const double target = 4.0 / 3.0, rh_target = 2.0 / std::sqrt(3.0);
  bool         monotone = true;
  for (std::size_t i = 1; i < a.size(); ++i)
    monotone = monotone && a[i] >= a[i - 1];
  const bool ok = monotone && a.back() >= target - 0.02 && a.back() <= target + 1e-9 &&
                  std::abs(rh - rh_target) <= 0.01 * rh_target && dt < 60.0;
  return {ok, "A2[x^0.5] = " + join(a) + " (target " + fmt_short(target, 7) + "); RH2[x] at 4096 = " +
                  fmt_short(rh, 7) + " (target " + fmt_short(rh_target, 7) + "); " + fmt_short(dt, 3) + " s"};
}

Outcome ac6()
{
  const auto   t0     = Clock::now();
  const double Qa     = 4.0 / 3.0;
  const double Qr     = 2.0 / std::sqrt(3.0);
  const double alpha  = extremal_alpha(ClassKind::MuckenhouptA, PParam(2.0), Qa, Branch::Minus);
  const double beta   = extremal_alpha(ClassKind::ReverseHolder, PParam(2.0), Qr, Branch::Plus);
  const auto   a15    = power_sequence(alpha, ClassKind::MuckenhouptA, 1.5);
  const auto   a16    = power_sequence(alpha, ClassKind::MuckenhouptA, 1.6);
  const auto   rh3    = power_sequence(beta, ClassKind::ReverseHolder, 3.0);
  const auto   rh25   = power_sequence(beta, ClassKind::ReverseHolder, 2.5);
  const double dt     = seconds_since(t0);
  const bool   div_a  = strictly_increasing(a15);
  const bool   div_rh = strictly_increasing(rh3);
  const bool   st_a   = last_change(a16) <= 0.01;
  const bool   st_rh  = last_change(rh25) <= 0.01;

  std::ostringstream d;
  d << "A1.5 " << join(a15) << (div_a ? " increasing" : " NOT increasing") << "; A1.6 " << join(a16)
    << " last change " << fmt_short(100 * last_change(a16), 3) << "%" << (st_a ? "" : " > 1%") << "; RH3 "
    << join(rh3) << (div_rh ? " increasing" : " NOT increasing") << "; RH2.5 " << join(rh25) << " last change "
    << fmt_short(100 * last_change(rh25), 3) << "%" << (st_rh ? "" : " > 1%") << "; " << fmt_short(dt, 3) << " s";
  return {div_a && div_rh && st_a && st_rh && dt < 120.0, d.str()};
}

struct TreeStats
{
  bool   ratios_ok   = true;
  bool   segments_ok = true;
  double identity    = 0.0; // worst relative deviation of the convex-combination identity
};

TreeStats tree_stats(const SplitTree &tree)
{
  TreeStats s;
  for (const auto &n : tree.nodes) {
    if (!n.split)
      continue;
    const auto  &a      = tree.nodes[static_cast<std::size_t>(n.children[0])];
    const auto  &b      = tree.nodes[static_cast<std::size_t>(n.children[1])];
    const double lambda = a.mass / n.mass;
    s.ratios_ok   = s.ratios_ok && n.split->ratio > tree.config.c && n.split->ratio < 1.0 - tree.config.c;
    s.segments_ok = s.segments_ok && n.split->segment_max <= tree.config.Q1;
    s.identity    = std::max({s.identity, std::abs(lambda * a.x.x1 + (1 - lambda) * b.x.x1 - n.x.x1) / n.x.x1,
                              std::abs(lambda * a.x.x2 + (1 - lambda) * b.x.x2 - n.x.x2) / n.x.x2,
                              std::abs(a.mass + b.mass - n.mass) / n.mass});
  }
  return s;
}

SplitTree ac7_tree(const WeightedGrid &g)
{
  SplitConfig cfg = SplitConfig::with_defaults(ClassKind::MuckenhouptA, PParam(2.0), 4.0 / 3.0, 10);
  cfg.Q1          = 1.4;
  cfg.c           = 0.2;
  return build_tree(g, BoxIdx::full(g.shape), cfg);
}

Outcome ac7()
{
  const auto t0 = Clock::now();
  const auto g  = power_weight_grid(0.5, 1024);
  SplitTree  tree;
  try {
    tree = ac7_tree(g);
  } catch (const std::exception &e) {
    return {false, std::string("tree construction failed: ") + e.what()};
  }
  const double    dt    = seconds_since(t0);
  const TreeStats s     = tree_stats(tree);
  const double    diam  = tree.levels.back().max_diameter / tree.levels.front().max_diameter;
  const double    l1    = tree.levels.back().l1_x1;
  const bool      ok    = s.ratios_ok && s.segments_ok && s.identity <= 1e-12 && diam <= 0.15 && l1 <= 0.02 && dt < 30.0;
  std::ostringstream d;
  d << tree.nodes.size() << " nodes, 0 infeasible; ratios " << (s.ratios_ok ? "ok" : "OUT OF WINDOW")
    << "; segment maxima " << (s.segments_ok ? "<= 1.4" : "EXCEED 1.4") << "; identity error "
    << fmt_short(s.identity, 3) << "; leaf/root diameter " << fmt_short(diam, 4) << "; L1(x1) "
    << fmt_short(100 * l1, 4) << "% of <w>; " << fmt_short(dt, 3) << " s";
  return {ok, d.str()};
}

Outcome ac8()
{
  const auto        t0 = Clock::now();
  const PParam      two(2.0);
  const OmegaDomain d2(ClassKind::MuckenhouptA, two, 2.0);

  const auto lin = verify_candidate(d2, linear_candidate(ClassKind::MuckenhouptA, two, 2.0), 1.0);
  const bool lin_ok = lin.passed && lin.violations.empty() && lin.c_hat == 1.0 && lin.boundary_max_error <= 1e-10;

  const auto control = tabulated_candidate(read_candidate_table(std::string(SW_FIXTURES) + "/ap_p2_x1pow1.3_Q2.cand"));
  const auto neg     = verify_candidate(d2, control, 1.3);
  const bool neg_ok  = !neg.passed && !neg.violations.empty();

  // Linear chain on every fixture tree.
  std::vector<std::pair<WeightedGrid, SplitTree>> trees;
  {
    const auto g = power_weight_grid(0.5, 1024);
    trees.emplace_back(g, ac7_tree(g));
  }
  {
    const auto g = uniform_grid({1024}, std::vector<double>(1024, 1.0));
    trees.emplace_back(g, build_tree(g, BoxIdx::full(g.shape),
                                     SplitConfig::with_defaults(ClassKind::MuckenhouptA, two, 1.01, 10)));
  }
  {
    const auto g = uniform_grid({16, 16}, std::vector<double>(256, 1.0));
    trees.emplace_back(g, build_tree(g, BoxIdx::full(g.shape),
                                     SplitConfig::with_defaults(ClassKind::MuckenhouptA, two, 1.01, 8)));
  }
  {
    const double Q = 2.0 / std::sqrt(3.0);
    const auto   g = power_weight_grid(-1.0 / 3.0, 1024);
    auto         c = SplitConfig::with_defaults(ClassKind::ReverseHolder, two, Q, 8);
    trees.emplace_back(g, build_tree(g, BoxIdx::full(g.shape), c));
  }
  double chain_dev = 0.0;
  for (const auto &[g, tree] : trees) {
    const auto cand = linear_candidate(tree.config.kind, tree.config.p, tree.config.Q1);
    const auto rep  = chain_report(tree, g, 1.0, cand);
    for (double s : rep.sums)
      chain_dev = std::max(chain_dev, std::abs(s - rep.sums.front()) / rep.sums.front());
  }
  const bool   chain_ok = chain_dev <= 1e-12;
  const double dt       = seconds_since(t0);

  std::ostringstream d;
  d << "linear: " << (lin.passed ? "pass" : "fail") << ", c_hat " << fmt_short(lin.c_hat, 12) << ", "
    << lin.violations.size() << " violations, boundary error " << fmt_short(lin.boundary_max_error, 3)
    << "; x1^1.3 control: " << (neg.passed ? "pass" : "fail") << " with " << neg.violations.size()
    << " violations; linear chain deviation " << fmt_short(chain_dev, 3) << " on " << trees.size() << " trees; "
    << fmt_short(dt, 3) << " s";
  return {lin_ok && neg_ok && chain_ok && dt < 10.0, d.str()};
}

Outcome ac9()
{
  const auto      t0 = Clock::now();
  std::mt19937_64 rng(9);
  int             fixtures = 0, scale_fail = 0, amono_fail = 0, rhmono_fail = 0, jensen_fail = 0;
  for (int i = 0; i < 120; ++i) {
    const auto   g = test::random_grid(rng, 8, 2);
    const double c = std::exp(std::uniform_real_distribution<double>(-6.0, 6.0)(rng));
    const auto   h = test::scaled(g, c);
    ++fixtures;
    for (auto kind : {ClassKind::MuckenhouptA, ClassKind::ReverseHolder}) {
      const double a = characteristic(g, kind, 2.0).value;
      const double b = characteristic(h, kind, 2.0).value;
      if (std::abs(a - b) > 1e-12 * a)
        ++scale_fail;
    }
    const double qs[] = {1.25, 1.5, 2.0, 3.0, 5.0};
    double       prev_a = INFINITY, prev_rh = 0.0;
    for (double q : qs) {
      const double a  = characteristic(g, ClassKind::MuckenhouptA, q).value;
      const double rh = characteristic(g, ClassKind::ReverseHolder, q).value;
      if (a > prev_a * (1 + 1e-12))
        ++amono_fail;
      if (rh < prev_rh * (1 - 1e-12))
        ++rhmono_fail;
      prev_a  = a;
      prev_rh = rh;
    }
    test::for_each_box(g.shape, [&](const BoxIdx &b) {
      for (auto kind : {ClassKind::MuckenhouptA, ClassKind::ReverseHolder}) {
        const double s = moment_exponent(kind, 2.0);
        const auto   m = test::naive_moments(g, b, s);
        if (psi(kind, 2.0, m.m1 / m.mass, m.ms / m.mass) < 1.0 - 1e-12)
          ++jensen_fail;
      }
    });
  }
  const double dt = seconds_since(t0);
  std::ostringstream d;
  d << fixtures << " fixtures: scale " << scale_fail << ", A q-monotonicity " << amono_fail << ", RH q-monotonicity "
    << rhmono_fail << ", Jensen " << jensen_fail << " failures; " << fmt_short(dt, 3) << " s";
  return {scale_fail + amono_fail + rhmono_fail + jensen_fail == 0 && dt < 60.0, d.str()};
}

} // namespace

int main(int argc, char **argv)
{
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only K]\n";
      return 2;
    }
  }
  const std::function<Outcome()> criteria[] = {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9};
  if (only < 0 || only > 9) {
    std::cerr << "criterion must be between 1 and 9\n";
    return 2;
  }

  bool all = true;
  for (int k = 1; k <= 9; ++k) {
    if (only != 0 && k != only)
      continue;
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "AC" << k << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
