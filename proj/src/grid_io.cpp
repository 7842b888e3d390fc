#include "strongweights/grid_io.hpp"

#include "strongweights/errors.hpp"
#include "strongweights/format.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace sw {

namespace {

class Tokens
{
public:
  explicit Tokens(std::istream &in)
  {
    std::string line;
    int         lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      std::istringstream ls(line);
      std::string        tok;
      while (ls >> tok)
        toks_.push_back({tok, lineno});
    }
  }

  bool        done() const { return pos_ >= toks_.size(); }
  std::string peek() const { return done() ? std::string() : toks_[pos_].text; }

  std::string next(const char *what)
  {
    if (done())
      throw PreconditionError(std::string("grid file: unexpected end of input, expected ") + what);
    return toks_[pos_++].text;
  }

  double number(const char *what)
  {
    const int         line = done() ? 0 : toks_[pos_].line;
    const std::string tok  = next(what);
    char             *end  = nullptr;
    errno                  = 0;
    const double v         = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE)
      throw PreconditionError("grid file line " + std::to_string(line) + ": bad number '" + tok + "' for " + what);
    return v;
  }

  std::size_t count(const char *what)
  {
    const double v = number(what);
    if (!(v >= 0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw PreconditionError(std::string("grid file: expected a non-negative integer for ") + what);
    return static_cast<std::size_t>(v);
  }

  bool at_keyword() const
  {
    const std::string t = peek();
    return t == "mass" || t == "weight" || t == "axis" || t == "generator" || t == "rank";
  }

private:
  struct Token
  {
    std::string text;
    int         line;
  };
  std::vector<Token> toks_;
  std::size_t        pos_ = 0;
};

std::vector<double> read_values(Tokens &t, std::size_t n, const char *what)
{
  std::vector<double> v(n);
  for (auto &x : v)
    x = t.number(what);
  return v;
}

} // namespace

GridFile read_grid_file(std::istream &in)
{
  Tokens t(in);
  if (t.next("header") != "strongweights-grid")
    throw PreconditionError("grid file: missing 'strongweights-grid' header");
  if (t.count("format version") != 1)
    throw PreconditionError("grid file: unsupported format version");

  GridFile    f;
  std::size_t rank = 0;
  while (!t.done()) {
    const std::string key = t.next("keyword");
    if (key == "rank") {
      rank = t.count("rank");
      if (rank < 1 || rank > kMaxRank)
        throw PreconditionError("grid file: rank must be between 1 and 3");
      f.breakpoints.assign(rank, {});
    } else if (key == "axis") {
      const std::size_t axis = t.count("axis index");
      if (axis >= rank)
        throw PreconditionError("grid file: axis " + std::to_string(axis) + " outside declared rank");
      auto &bp = f.breakpoints[axis];
      bp.clear();
      while (!t.done() && !t.at_keyword())
        bp.push_back(t.number("breakpoint"));
    } else if (key == "generator") {
      if (t.next("generator kind") != "power")
        throw PreconditionError("grid file: only 'generator power <alpha>' is supported");
      f.power_alpha = t.number("power exponent");
    } else if (key == "mass" || key == "weight") {
      if (rank == 0)
        throw PreconditionError("grid file: '" + key + "' section before 'rank'");
      std::size_t n = 1;
      for (const auto &bp : f.breakpoints) {
        if (bp.size() < 2)
          throw PreconditionError("grid file: every axis needs breakpoints before '" + key + "'");
        n *= bp.size() - 1;
      }
      auto values = read_values(t, n, key.c_str());
      (key == "mass" ? f.mass : f.weight) = std::move(values);
    } else {
      throw PreconditionError("grid file: unknown keyword '" + key + "'");
    }
  }
  if (rank == 0)
    throw PreconditionError("grid file: missing 'rank'");
  return f;
}

GridFile read_grid_file(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw PreconditionError("cannot open grid file " + path.string());
  return read_grid_file(in);
}

void write_grid_file(std::ostream &out, const WeightedGrid &grid)
{
  out << "strongweights-grid 1\n";
  out << "rank " << grid.shape.rank() << "\n";
  for (std::size_t a = 0; a < grid.shape.rank(); ++a) {
    out << "axis " << a;
    for (double b : grid.measure.breakpoints[a])
      out << ' ' << fmt_exact(b);
    out << "\n";
  }
  if (grid.weight.power_alpha)
    out << "generator power " << fmt_exact(*grid.weight.power_alpha) << "\n";
  const std::size_t last = grid.shape.extent(grid.shape.rank() - 1);
  auto              dump = [&](const char *name, const std::vector<double> &v) {
    out << name << "\n";
    for (std::size_t c = 0; c < v.size(); ++c)
      out << fmt_exact(v[c]) << ((c + 1) % last == 0 ? '\n' : ' ');
  };
  dump("mass", grid.measure.mass);
  dump("weight", grid.weight.values);
}

WeightedGrid load_weighted_grid(const std::filesystem::path &measure_path,
                                const std::filesystem::path &weight_path)
{
  GridFile m = read_grid_file(measure_path);
  GridFile w = measure_path == weight_path ? m : read_grid_file(weight_path);
  if (!m.mass)
    throw PreconditionError("measure file " + measure_path.string() + " has no 'mass' section");
  if (!w.weight)
    throw PreconditionError("weight file " + weight_path.string() + " has no 'weight' section");
  if (w.breakpoints.size() != m.breakpoints.size())
    throw PreconditionError("weight and measure files disagree on rank");
  for (std::size_t a = 0; a < m.breakpoints.size(); ++a)
    if (w.breakpoints[a].size() != m.breakpoints[a].size())
      throw PreconditionError("weight and measure files disagree on axis " + std::to_string(a) + " cell count");

  GridMeasure measure{std::move(m.breakpoints), std::move(*m.mass)};
  WeightGrid  weight{std::move(*w.weight), w.power_alpha};
  return validate(std::move(measure), std::move(weight));
}

void write_cell_csv(std::ostream &out, const WeightedGrid &grid)
{
  const std::size_t rank = grid.shape.rank();
  out << "cell";
  for (std::size_t a = 0; a < rank; ++a)
    out << ",i" << a << ",lo" << a << ",hi" << a;
  out << ",mass,weight\n";
  for (std::size_t c = 0; c < grid.shape.size(); ++c) {
    const CellIndex idx = grid.shape.unflat(c);
    out << c;
    for (std::size_t a = 0; a < rank; ++a)
      out << ',' << idx[a] << ',' << fmt_exact(grid.measure.breakpoints[a][idx[a]]) << ','
          << fmt_exact(grid.measure.breakpoints[a][idx[a] + 1]);
    out << ',' << fmt_exact(grid.measure.mass[c]) << ',' << fmt_exact(grid.weight.values[c]) << '\n';
  }
}

} // namespace sw
