#include "strongweights/candidate.hpp"

#include "strongweights/errors.hpp"
#include "strongweights/format.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

namespace sw {

namespace {

constexpr double kLatticeSlack = 1e-12;

std::string where(const AvgPoint &x)
{
  return "(" + fmt_exact(x.x1) + ", " + fmt_exact(x.x2) + ")";
}

double parse_number(const std::string &tok, const char *what)
{
  char *end = nullptr;
  errno     = 0;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || errno == ERANGE)
    throw PreconditionError(std::string("candidate file: bad number '") + tok + "' for " + what);
  return v;
}

std::size_t parse_count(const std::string &tok, const char *what)
{
  const double v = parse_number(tok, what);
  if (!(v >= 2) || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw PreconditionError(std::string("candidate file: ") + what + " must be an integer >= 2");
  return static_cast<std::size_t>(v);
}

std::string next_token(std::istream &in, const char *what)
{
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return tok;
  }
  throw PreconditionError(std::string("candidate file: unexpected end of input, expected ") + what);
}

// Locates t on a uniform lattice; returns the cell index and the offset in it.
bool locate(double t, double lo, double hi, std::size_t n, std::size_t &cell, double &frac)
{
  const double slack = kLatticeSlack * std::max(1.0, std::abs(hi - lo));
  if (t < lo - slack || t > hi + slack)
    return false;
  t               = std::clamp(t, lo, hi);
  const double pos = (t - lo) / (hi - lo) * static_cast<double>(n - 1);
  cell            = std::min(static_cast<std::size_t>(pos), n - 2);
  frac            = pos - static_cast<double>(cell);
  return true;
}

} // namespace

BellmanCandidate::BellmanCandidate(CandidateInfo info, Fn fn) : info_(std::move(info)), fn_(std::move(fn)) {}

double BellmanCandidate::operator()(const AvgPoint &x) const
{
  const double v = fn_(x);
  if (!std::isfinite(v) || v < 0.0)
    throw CandidateDomainError("candidate value " + fmt_exact(v) + " is not a finite non-negative number at " +
                                   where(x),
                               x.x1, x.x2);
  return v;
}

BellmanCandidate linear_candidate(ClassKind kind, PParam p, double Q)
{
  CandidateInfo info{kind, p.p(), 1.0, Q, "builtin:linear"};
  return BellmanCandidate(std::move(info), [](const AvgPoint &x) {
    if (!(x.x1 > 0.0) || !(x.x2 > 0.0))
      throw CandidateDomainError("linear candidate needs positive coordinates at " + where(x), x.x1, x.x2);
    return x.x1;
  });
}

CandidateTable read_candidate_table(std::istream &in)
{
  if (next_token(in, "header") != "strongweights-candidate")
    throw PreconditionError("candidate file: missing 'strongweights-candidate' header");
  if (parse_number(next_token(in, "version"), "version") != 1)
    throw PreconditionError("candidate file: unsupported format version");

  CandidateTable t;
  bool           have_u = false, have_v = false, have_values = false;
  while (!have_values) {
    const std::string key = next_token(in, "keyword");
    if (key == "class")
      t.kind = parse_class_kind(next_token(in, "class"));
    else if (key == "p")
      t.p = PParam(parse_number(next_token(in, "p"), "p")).p();
    else if (key == "r")
      t.r = parse_number(next_token(in, "r"), "r");
    else if (key == "Q")
      t.Q = parse_number(next_token(in, "Q"), "Q");
    else if (key == "accuracy")
      t.accuracy = parse_number(next_token(in, "accuracy"), "accuracy");
    else if (key == "log_x1") {
      t.u_lo = parse_number(next_token(in, "log_x1 lo"), "log_x1 lo");
      t.u_hi = parse_number(next_token(in, "log_x1 hi"), "log_x1 hi");
      t.nu   = parse_count(next_token(in, "log_x1 count"), "log_x1 count");
      have_u = true;
    } else if (key == "log_psi") {
      t.v_lo = parse_number(next_token(in, "log_psi lo"), "log_psi lo");
      t.v_hi = parse_number(next_token(in, "log_psi hi"), "log_psi hi");
      t.nv   = parse_count(next_token(in, "log_psi count"), "log_psi count");
      have_v = true;
    } else if (key == "values") {
      if (!have_u || !have_v)
        throw PreconditionError("candidate file: 'values' before both lattice axes are declared");
      t.values.resize(t.nu * t.nv);
      for (auto &v : t.values) {
        v = parse_number(next_token(in, "lattice value"), "lattice value");
        if (!(v > 0.0) || !std::isfinite(v))
          throw PreconditionError("candidate file: lattice values must be positive and finite");
      }
      have_values = true;
    } else {
      throw PreconditionError("candidate file: unknown keyword '" + key + "'");
    }
  }
  if (!(t.u_hi > t.u_lo) || !(t.v_hi > t.v_lo))
    throw PreconditionError("candidate file: lattice ranges must be increasing");
  if (!(t.accuracy >= 0.0))
    throw PreconditionError("candidate file: accuracy must be non-negative");
  return t;
}

CandidateTable read_candidate_table(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw PreconditionError("cannot open candidate file " + path.string());
  return read_candidate_table(in);
}

void write_candidate_table(std::ostream &out, const CandidateTable &t)
{
  out << "strongweights-candidate 1\n";
  out << "class " << to_string(t.kind) << "\n";
  out << "p " << fmt_exact(t.p) << "\n";
  out << "r " << fmt_exact(t.r) << "\n";
  out << "Q " << fmt_exact(t.Q) << "\n";
  out << "accuracy " << fmt_exact(t.accuracy) << "\n";
  out << "log_x1 " << fmt_exact(t.u_lo) << ' ' << fmt_exact(t.u_hi) << ' ' << t.nu << "\n";
  out << "log_psi " << fmt_exact(t.v_lo) << ' ' << fmt_exact(t.v_hi) << ' ' << t.nv << "\n";
  out << "values\n";
  for (std::size_t i = 0; i < t.nu; ++i)
    for (std::size_t j = 0; j < t.nv; ++j)
      out << fmt_exact(t.values[i * t.nv + j]) << (j + 1 == t.nv ? '\n' : ' ');
}

CandidateTable tabulate(ClassKind kind, PParam p, double r, double Q, double u_lo, double u_hi, std::size_t nu,
                        std::size_t nv, const std::function<double(const AvgPoint &)> &fn)
{
  CandidateTable t;
  t.kind = kind;
  t.p    = p.p();
  t.r    = r;
  t.Q    = Q;
  t.u_lo = u_lo;
  t.u_hi = u_hi;
  t.nu   = nu;
  t.v_lo = 0.0;
  t.v_hi = std::log(Q);
  t.nv   = nv;
  t.values.resize(nu * nv);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nv; ++j)
      t.values[i * nv + j] = fn(point_from_psi(kind, p, std::exp(t.node_u(i)), std::exp(t.node_v(j))));
  return t;
}

BellmanCandidate tabulated_candidate(CandidateTable table, std::string source)
{
  CandidateInfo info{table.kind, table.p, table.r, table.Q, std::move(source), table.accuracy, table.u_lo, table.u_hi};

  std::vector<double> logs(table.values.size());
  for (std::size_t k = 0; k < logs.size(); ++k)
    logs[k] = std::log(table.values[k]);
  auto data = std::make_shared<const std::pair<CandidateTable, std::vector<double>>>(std::move(table),
                                                                                     std::move(logs));

  return BellmanCandidate(std::move(info), [data](const AvgPoint &x) {
    const auto &[t, lg] = *data;
    if (!(x.x1 > 0.0) || !(x.x2 > 0.0))
      throw CandidateDomainError("tabulated candidate needs positive coordinates at " + where(x), x.x1, x.x2);
    const double u = std::log(x.x1);
    const double v = std::log(psi(t.kind, PParam(t.p), x));
    std::size_t  i = 0, j = 0;
    double       fu = 0.0, fv = 0.0;
    if (!locate(u, t.u_lo, t.u_hi, t.nu, i, fu) || !locate(v, t.v_lo, t.v_hi, t.nv, j, fv))
      throw CandidateDomainError("point " + where(x) + " lies outside the candidate lattice", x.x1, x.x2);
    const auto at = [&](std::size_t a, std::size_t b) { return lg[a * t.nv + b]; };
    const double l = (1 - fu) * ((1 - fv) * at(i, j) + fv * at(i, j + 1)) +
                     fu * ((1 - fv) * at(i + 1, j) + fv * at(i + 1, j + 1));
    return std::exp(l);
  });
}

} // namespace sw
