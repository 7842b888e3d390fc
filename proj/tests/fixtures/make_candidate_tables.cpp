// Writes the tabulated Bellman candidates used by the tests.
//
// For the A-class with p = 2 the domain and the boundary condition are
// invariant under w -> t w, so candidates of the form B = x1^r g(psi) with
// psi = x1 x2 and g(1) = 1 are natural. B is locally concave iff g'' <= 0 and
//
//   g'' (r (r - 1) g - 2 psi g') >= (r + 1)^2 g'^2.
//
// Taking g'' = (1 + delta) (r + 1)^2 g'^2 / (r (r - 1) g - 2 psi g') with a
// denominator that stays negative gives a strictly concave candidate. Log B is
// linear in log x1, so the lattice interpolation error comes from log psi only;
// it is measured here against the ODE solution and written as the table accuracy.

#include "strongweights/candidate.hpp"
#include "strongweights/format.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct State
{
  double g;
  double gp; // dg/dpsi
};

struct Ode
{
  double r;
  double delta;

  // Derivatives with respect to v = log psi.
  State rhs(double v, const State &s) const
  {
    const double t   = std::exp(v);
    const double den = r * (r - 1.0) * s.g - 2.0 * t * s.gp;
    if (!(den < 0.0))
      throw std::runtime_error("denominator reached zero; increase the initial slope");
    const double gpp = (1.0 + delta) * (r + 1.0) * (r + 1.0) * s.gp * s.gp / den;
    return {t * s.gp, t * gpp};
  }

  State step(double v, const State &s, double h) const
  {
    const auto add = [](const State &a, const State &b, double k) { return State{a.g + k * b.g, a.gp + k * b.gp}; };
    const State k1 = rhs(v, s);
    const State k2 = rhs(v + h / 2, add(s, k1, h / 2));
    const State k3 = rhs(v + h / 2, add(s, k2, h / 2));
    const State k4 = rhs(v + h, add(s, k3, h));
    return {s.g + h / 6 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g), s.gp + h / 6 * (k1.gp + 2 * k2.gp + 2 * k3.gp + k4.gp)};
  }
};

// log g at nv uniform nodes of [0, log Q]; also the worst interpolation error
// of log g between nodes, sampled at `sub` interior points per interval.
std::vector<double> solve_log_g(const Ode &ode, double slope, double Q, std::size_t nv, std::size_t sub, double &err)
{
  const double        vmax  = std::log(Q);
  const double        h     = vmax / static_cast<double>(nv - 1);
  const std::size_t   steps = 4 * sub;
  std::vector<double> nodes{0.0};
  std::vector<double> inner;
  State               s{1.0, slope};
  double              v = 0.0;
  err                   = 0.0;
  for (std::size_t j = 0; j + 1 < nv; ++j) {
    inner.clear();
    for (std::size_t k = 0; k < steps; ++k) {
      s = ode.step(v, s, h / steps);
      v += h / steps;
      if ((k + 1) % 4 == 0 && k + 1 < steps)
        inner.push_back(std::log(s.g));
    }
    nodes.push_back(std::log(s.g));
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const double f = static_cast<double>(i + 1) / static_cast<double>(sub);
      err            = std::max(err, std::abs((1 - f) * nodes[j] + f * nodes[j + 1] - inner[i]));
    }
  }
  return nodes;
}

sw::CandidateTable homogeneous_table(double r, double Q, double u_lo, double u_hi, std::size_t nu,
                                     const std::vector<double> &log_g, double accuracy)
{
  sw::CandidateTable t;
  t.kind     = sw::ClassKind::MuckenhouptA;
  t.p        = 2.0;
  t.r        = r;
  t.Q        = Q;
  t.accuracy = accuracy;
  t.u_lo     = u_lo;
  t.u_hi     = u_hi;
  t.nu       = nu;
  t.v_lo     = 0.0;
  t.v_hi     = std::log(Q);
  t.nv       = log_g.size();
  t.values.resize(nu * t.nv);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < t.nv; ++j)
      t.values[i * t.nv + j] = std::exp(r * t.node_u(i) + log_g[j]);
  return t;
}

void write(const std::string &path, const sw::CandidateTable &t, const std::string &note)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << "# " << note << "\n";
  sw::write_candidate_table(out, t);
  std::cout << path << ": accuracy " << sw::fmt_short(t.accuracy, 4) << "\n";
}

void concave(const std::string &dir, const std::string &name, double r, double Q, double slope, double u_lo,
             double u_hi)
{
  const Ode   ode{r, 0.05};
  double      err = 0.0;
  const auto  lg  = solve_log_g(ode, slope, Q, 1001, 16, err);
  // Relative error of B is about the log error; keep a factor 2 of headroom.
  const double acc = 2.0 * std::max(err, 1e-15);
  write(dir + "/" + name, homogeneous_table(r, Q, u_lo, u_hi, 7, lg, acc),
        "x1^r g(x1 x2), strictly concave, g'(1) = " + sw::fmt_short(slope));
}

} // namespace

int main(int argc, char **argv)
{
  const std::string dir = argc > 1 ? argv[1] : ".";
  try {
    concave(dir, "ap_p2_r1.2_Q2.cand", 1.2, 2.0, 2.0, -3.0, 3.0);
    concave(dir, "ap_p2_r1.5_Q1.5.cand", 1.5, 1.5, 8.0, -5.0, 1.0);
    // x1^1.3: boundary-exact but convex along x2 = const.
    write(dir + "/ap_p2_x1pow1.3_Q2.cand",
          homogeneous_table(1.3, 2.0, -3.0, 3.0, 7, std::vector<double>(101, 0.0), 0.0),
          "x1^1.3 convexity control");
  } catch (const std::exception &e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
