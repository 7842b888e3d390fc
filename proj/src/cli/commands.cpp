#include "commands.hpp"

#include "strongweights/bellman.hpp"
#include "strongweights/candidate.hpp"
#include "strongweights/characteristics.hpp"
#include "strongweights/errors.hpp"
#include "strongweights/exponents.hpp"
#include "strongweights/format.hpp"
#include "strongweights/grid.hpp"
#include "strongweights/grid_io.hpp"
#include "strongweights/splitting.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#ifndef STRONGWEIGHTS_VERSION
#define STRONGWEIGHTS_VERSION "unknown"
#endif

namespace sw::cli {

namespace {

namespace fs = std::filesystem;

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

using Params = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream &os, const std::string &command, const Params &params)
{
  os << "# strongweights " << STRONGWEIGHTS_VERSION << "\n";
  os << "# command " << command << "\n";
  for (const auto &[k, v] : params)
    os << "# " << k << " = " << v << "\n";
}

// Writes to path through a temporary file and a rename; "-" or empty means out.
void emit(const std::string &path, std::ostream &out, const std::function<void(std::ostream &)> &body)
{
  if (path.empty() || path == "-") {
    body(out);
    return;
  }
  const fs::path target(path);
  fs::path       tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f)
      throw IoError("cannot open " + tmp.string() + " for writing");
    body(f);
    f.flush();
    if (!f)
      throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
    throw IoError("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
}

std::vector<double> parse_list(const std::string &text)
{
  std::vector<double> out;
  std::stringstream   ss(text);
  std::string         item;
  while (std::getline(ss, item, ',')) {
    char        *end = nullptr;
    const double v   = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0')
      throw PreconditionError("bad number '" + item + "' in list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw PreconditionError("empty list");
  return out;
}

std::vector<std::size_t> parse_counts(const std::string &text)
{
  std::vector<std::size_t> out;
  for (double v : parse_list(text)) {
    if (!(v >= 1) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw PreconditionError("expected positive integers in '" + text + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string join(const std::vector<std::size_t> &v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

ScanOptions scan_options(unsigned threads)
{
  ScanOptions o;
  o.partitions = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  return o;
}

std::string box_label(const BoxIdx &box, const Shape &shape)
{
  return box == BoxIdx::full(shape) ? to_string(box) + " (full box)" : to_string(box);
}

BellmanCandidate load_candidate(const std::string &source, ClassKind kind, PParam p, double Q)
{
  if (source == "builtin:linear")
    return linear_candidate(kind, p, Q);
  return tabulated_candidate(read_candidate_table(fs::path(source)), source);
}

struct GridArgs
{
  std::string weight;
  std::string measure;

  void add(CLI::App *cmd, bool required = true)
  {
    auto *w = cmd->add_option("--weight", weight, "Grid file holding the weight (and possibly the measure)");
    if (required)
      w->required();
    cmd->add_option("--measure", measure, "Grid file holding the measure (defaults to --weight)");
  }

  WeightedGrid load() const { return load_weighted_grid(measure.empty() ? weight : measure, weight); }

  void record(Params &params) const
  {
    params.emplace_back("weight", weight);
    params.emplace_back("measure", measure.empty() ? weight : measure);
  }
};

// ---------------------------------------------------------------------------

struct ExponentsCmd
{
  std::string cls = "ap";
  double      p   = 2.0;
  double      Q   = 0.0;
  std::string format = "text";
  std::string output;

  void add(CLI::App &app, std::function<void()> &run, std::ostream &out)
  {
    auto *cmd = app.add_subcommand("exponents", "Sharp self-improvement ranges for a characteristic bound Q");
    cmd->add_option("--class", cls, "Weight class: ap or rh")->required();
    cmd->add_option("--p", p, "Class exponent p > 1")->required();
    cmd->add_option("--Q", Q, "Characteristic bound Q > 1")->required();
    cmd->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
    cmd->add_option("--output", output, "Output path (default stdout)");
    cmd->callback([this, &run, &out] { run = [this, &out] { exec(out); }; });
  }

  void exec(std::ostream &out) const
  {
    const ClassKind  kind = parse_class_kind(cls);
    const PParam     pp(p);
    const SharpRange r      = sharp_range(kind, pp, Q);
    const double     a_plus = extremal_alpha(kind, pp, Q, Branch::Plus);
    const double     a_min  = extremal_alpha(kind, pp, Q, Branch::Minus);
    const Params     params{{"class", std::string(to_string(kind))}, {"p", fmt_exact(p)}, {"Q", fmt_exact(Q)}};
    emit(output, out, [&](std::ostream &os) {
      if (format == "csv") {
        write_header(os, "exponents", params);
        os << "class,p,Q,s_minus,s_plus,a_lower,rh_upper,alpha_minus,alpha_plus\n";
        os << to_string(kind) << ',' << fmt_exact(p) << ',' << fmt_exact(Q) << ',' << fmt_exact(r.s_minus) << ','
           << fmt_exact(r.s_plus) << ',' << fmt_exact(r.a_lower) << ',' << fmt_exact(r.rh_upper) << ','
           << fmt_exact(a_min) << ',' << fmt_exact(a_plus) << '\n';
        return;
      }
      os << "class        " << to_string(kind) << "\n";
      os << "p            " << fmt_short(p, 15) << "\n";
      os << "Q            " << fmt_short(Q, 15) << "\n";
      os << "s_minus      " << fmt_short(r.s_minus, 15) << "\n";
      os << "s_plus       " << fmt_short(r.s_plus, 15) << "\n";
      os << "a_lower      " << fmt_short(r.a_lower, 15) << "\n";
      os << "rh_upper     " << fmt_short(r.rh_upper, 15) << "\n";
      os << "alpha_minus  " << fmt_short(a_min, 15) << "\n";
      os << "alpha_plus   " << fmt_short(a_plus, 15) << "\n";
    });
  }
};

struct CharacteristicCmd
{
  std::string cls = "ap";
  double      p   = 2.0;
  GridArgs    grid;
  unsigned    threads = 1;
  std::string output;

  void add(CLI::App &app, std::function<void()> &run, std::ostream &out)
  {
    auto *cmd = app.add_subcommand("characteristic", "Exact box characteristic of a grid weight");
    cmd->add_option("--class", cls, "ap or rh")->required();
    cmd->add_option("--p", p, "Exponent (q > 1 for ap, q >= 1 for rh)")->required();
    grid.add(cmd);
    cmd->add_option("--threads", threads, "Scan partitions (0 = hardware concurrency)");
    cmd->add_option("--output", output, "CSV output path (default stdout)");
    cmd->callback([this, &run, &out] { run = [this, &out] { exec(out); }; });
  }

  void exec(std::ostream &out) const
  {
    const ClassKind kind = parse_class_kind(cls);
    const auto      g    = grid.load();
    const auto      rep  = characteristic(g, kind, p, scan_options(threads));
    Params          params{{"class", std::string(to_string(kind))}, {"p", fmt_exact(p)}};
    grid.record(params);
    emit(output, out, [&](std::ostream &os) {
      write_header(os, "characteristic", params);
      os << "class,p,value,argmax,boxes_scanned\n";
      os << to_string(kind) << ',' << fmt_exact(p) << ',' << fmt_exact(rep.value) << ",\""
         << box_label(rep.argmax, g.shape) << "\"," << rep.boxes_scanned << '\n';
    });
  }
};

struct QScanCmd
{
  std::string cls = "ap";
  std::string qs;
  GridArgs    grid;
  unsigned    threads = 1;
  std::string output;

  void add(CLI::App &app, std::function<void()> &run, std::ostream &out)
  {
    auto *cmd = app.add_subcommand("q-scan", "Characteristics for a list of exponents");
    cmd->add_option("--class", cls, "ap or rh")->required();
    cmd->add_option("--q", qs, "Comma-separated exponents")->required();
    grid.add(cmd);
    cmd->add_option("--threads", threads, "Scan partitions (0 = hardware concurrency)");
    cmd->add_option("--output", output, "CSV output path (default stdout)");
    cmd->callback([this, &run, &out] { run = [this, &out] { exec(out); }; });
  }

  void exec(std::ostream &out) const
  {
    const ClassKind kind = parse_class_kind(cls);
    const auto      g    = grid.load();
    const auto      list = parse_list(qs);
    const auto      rows = q_scan(g, kind, list, scan_options(threads));
    Params          params{{"class", std::string(to_string(kind))}, {"q", qs}};
    grid.record(params);
    emit(output, out, [&](std::ostream &os) {
      write_header(os, "q-scan", params);
      os << "q,value,argmax,error\n";
      for (const auto &r : rows) {
        os << fmt_exact(r.q) << ',';
        if (r.value)
          os << fmt_exact(*r.value) << ",\"" << to_string(*r.argmax) << "\",";
        else
          os << ",,\"" << r.error << "\"";
        os << '\n';
      }
    });
  }
};

struct GenerateCmd
{
  double      alpha = 0.5;
  std::size_t cells = 1024;
  std::string dims  = "4";
  double      value = 1.0;
  std::string output;
  std::string csv;

  void add(CLI::App &app, std::function<void()> &run, std::ostream &out)
  {
    auto *gen = app.add_subcommand("generate", "Write fixture grid files");
    gen->require_subcommand(1);

    auto *power = gen->add_subcommand("power", "Cell averages of x^alpha on a uniform grid of [0, 1]");
    power->add_option("--alpha", alpha, "Exponent alpha > -1")->required();
    power->add_option("--cells", cells, "Number of cells")->required();
    power->add_option("--output", output, "Grid file path (default stdout)");
    power->add_option("--csv", csv, "Also write a per-cell CSV table");
    power->callback([this, &run, &out] {
      run = [this, &out] {
        write(out, power_weight_grid(alpha, cells), {{"generator", "power"}, {"alpha", fmt_exact(alpha)},
                                                     {"cells", std::to_string(cells)}});
      };
    });

    auto *constant = gen->add_subcommand("constant", "Constant weight on a uniform grid of [0, 1]^n");
    constant->add_option("--cells", dims, "Cells per axis, comma separated")->required();
    constant->add_option("--value", value, "Weight value");
    constant->add_option("--output", output, "Grid file path (default stdout)");
    constant->add_option("--csv", csv, "Also write a per-cell CSV table");
    constant->callback([this, &run, &out] {
      run = [this, &out] {
        const auto   n = parse_counts(dims);
        std::size_t  total = 1;
        for (auto e : n)
          total *= e;
        write(out, uniform_grid(n, std::vector<double>(total, value)),
              {{"generator", "constant"}, {"cells", join(n)}, {"value", fmt_exact(value)}});
      };
    });
  }

  void write(std::ostream &out, const WeightedGrid &g, const Params &params) const
  {
    emit(output, out, [&](std::ostream &os) {
      write_header(os, "generate", params);
      write_grid_file(os, g);
    });
    if (!csv.empty())
      emit(csv, out, [&](std::ostream &os) {
        write_header(os, "generate", params);
        write_cell_csv(os, g);
      });
  }
};

struct SharpnessCmd
{
  std::string cls  = "ap";
  double      p    = 2.0;
  double      Q    = 0.0;
  std::string side = "minus";
  std::string cells = "256,1024,4096,16384";
  double      inside_q = 0.0;
  unsigned    threads  = 0;
  std::string output;

  void add(CLI::App &app, std::function<void()> &run, std::ostream &out)
  {
    auto *cmd = app.add_subcommand("sharpness", "Critical and interior exponents on refined power-weight extremizers");
    cmd->add_option("--class", cls, "Hypothesis class: ap or rh")->required();
    cmd->add_option("--p", p, "Hypothesis exponent")->required();
    cmd->add_option("--Q", Q, "Hypothesis characteristic bound")->required();
    cmd->add_option("--side", side, "minus: A-class conclusion at a_lower; plus: RH-class conclusion at rh_upper")
        ->check(CLI::IsMember({"plus", "minus"}));
    cmd->add_option("--cells", cells, "Comma-separated grid sizes");
    cmd->add_option("--inside-q", inside_q, "Interior exponent (default 1 + 1.2 (a_lower - 1) or 1 + 0.75 (rh_upper - 1))");
    cmd->add_option("--threads", threads, "Scan partitions (0 = hardware concurrency)");
    cmd->add_option("--output", output, "CSV output path (default stdout)");
    cmd->callback([this, &run, &out] { run = [this, &out] { exec(out); }; });
  }

  void exec(std::ostream &out) const
  {
    const ClassKind  kind   = parse_class_kind(cls);
    const PParam     pp(p);
    const Branch     br     = parse_branch(side);
    const SharpRange range  = sharp_range(kind, pp, Q);
    const double     alpha  = extremal_alpha(kind, pp, Q, br);
    const ClassKind  target = br == Branch::Minus ? ClassKind::MuckenhouptA : ClassKind::ReverseHolder;
    const double     crit   = br == Branch::Minus ? range.a_lower : range.rh_upper;
    double           inside = inside_q;
    if (inside == 0.0)
      inside = br == Branch::Minus ? 1.0 + 1.2 * (range.a_lower - 1.0) : 1.0 + 0.75 * (range.rh_upper - 1.0);
    const auto sizes = parse_counts(cells);
    const auto scan  = scan_options(threads);

    std::vector<double> hyp, vc, vi;
    for (std::size_t n : sizes) {
      const auto g = power_weight_grid(alpha, n);
      hyp.push_back(characteristic(g, kind, p, scan).value);
      vc.push_back(characteristic(g, target, crit, scan).value);
      vi.push_back(characteristic(g, target, inside, scan).value);
    }

    const Params params{{"class", std::string(to_string(kind))}, {"p", fmt_exact(p)},         {"Q", fmt_exact(Q)},
                        {"side", std::string(to_string(br))},     {"alpha", fmt_exact(alpha)}, {"target", std::string(to_string(target))},
                        {"critical_q", fmt_exact(crit)},           {"inside_q", fmt_exact(inside)}, {"cells", join(sizes)}};
    emit(output, out, [&](std::ostream &os) {
      write_header(os, "sharpness", params);
      os << "cells,hypothesis,critical,inside\n";
      for (std::size_t i = 0; i < sizes.size(); ++i)
        os << sizes[i] << ',' << fmt_exact(hyp[i]) << ',' << fmt_exact(vc[i]) << ',' << fmt_exact(vi[i]) << '\n';
      if (sizes.size() >= 2) {
        const auto tc = classify_trend(vc);
        const auto ti = classify_trend(vi);
        os << "# critical trend: " << to_string(tc.trend) << " (last change " << fmt_short(tc.last_relative_change, 4)
           << ")\n";
        os << "# inside trend: " << to_string(ti.trend) << " (last change " << fmt_short(ti.last_relative_change, 4)
           << ")\n";
      }
    });
  }
};

struct SplitCmd
{
  std::string cls = "ap";
  double      p   = 2.0;
  double      Q   = 0.0;
  double      Q1  = 0.0;
  double      c   = 0.2;
  std::size_t levels  = 6;
  std::size_t samples = 257;
  GridArgs    grid;
  std::string trace;
  std::string candidate;
  double      r = 1.0;
  std::string output;

  void add(CLI::App &app, std::function<void()> &run, std::ostream &out)
  {
    auto *cmd = app.add_subcommand("split", "Recursive measure-balanced box splitting");
    cmd->add_option("--class", cls, "ap or rh")->required();
    cmd->add_option("--p", p, "Class exponent")->required();
    cmd->add_option("--Q", Q, "Characteristic bound of the weight")->required();
    cmd->add_option("--Q1", Q1, "Enlarged domain bound (default 1.05 Q)");
    cmd->add_option("--c", c, "Ratio window constant in (0, 1/2]");
    cmd->add_option("--levels", levels, "Depth M")->required();
    cmd->add_option("--samples", samples, "Segment samples");
    grid.add(cmd);
    cmd->add_option("--trace", trace, "Per-node trace CSV path");
    cmd->add_option("--candidate", candidate, "Bellman candidate for the chain report (builtin:linear or a table file)");
    cmd->add_option("--r", r, "Exponent r for the chain report");
    cmd->add_option("--output", output, "Per-level summary CSV path (default stdout)");
    cmd->callback([this, &run, &out] { run = [this, &out] { exec(out); }; });
  }

  void exec(std::ostream &out) const
  {
    const ClassKind kind = parse_class_kind(cls);
    const PParam    pp(p);
    SplitConfig     cfg = SplitConfig::with_defaults(kind, pp, Q, levels);
    if (Q1 != 0.0)
      cfg.Q1 = Q1;
    cfg.c               = c;
    cfg.segment_samples = samples;
    cfg.validate();

    const auto g    = grid.load();
    const auto root = BoxIdx::full(g.shape);
    const auto hyp  = characteristic(g, kind, p);
    if (!(hyp.value <= Q * (1.0 + 1e-12)))
      throw PreconditionError("weight characteristic " + fmt_short(hyp.value) + " exceeds Q = " + fmt_short(Q) +
                              " on box " + to_string(hyp.argmax));
    const SplitTree tree = build_tree(g, root, cfg);

    std::optional<ChainReport> chain;
    if (!candidate.empty())
      chain = chain_report(tree, g, r, load_candidate(candidate, kind, pp, cfg.Q1));

    Params params{{"class", std::string(to_string(kind))}, {"p", fmt_exact(p)},   {"Q", fmt_exact(Q)},
                  {"Q1", fmt_exact(cfg.Q1)},                 {"c", fmt_exact(c)},   {"levels", std::to_string(levels)},
                  {"segment_samples", std::to_string(samples)}};
    grid.record(params);
    if (chain) {
      params.emplace_back("candidate", candidate);
      params.emplace_back("r", fmt_exact(r));
    }

    if (!trace.empty())
      emit(trace, out, [&](std::ostream &os) {
        write_header(os, "split", params);
        write_trace_csv(os, tree, g.measure);
      });
    emit(output, out, [&](std::ostream &os) {
      write_header(os, "split", params);
      os << "level,nodes,max_diameter,l1_x1,l1_x2" << (chain ? ",S" : "") << '\n';
      for (const auto &lvl : tree.levels) {
        os << lvl.level << ',' << lvl.nodes.size() << ',' << fmt_exact(lvl.max_diameter) << ','
           << fmt_exact(lvl.l1_x1) << ',' << fmt_exact(lvl.l1_x2);
        if (chain)
          os << ',' << fmt_exact(chain->sums[lvl.level]);
        os << '\n';
      }
      if (chain)
        os << "# terminal <w^r> = " << fmt_exact(chain->terminal) << '\n';
    });
  }
};

struct BellmanVerifyCmd
{
  std::string   candidate = "builtin:linear";
  std::string   cls;
  double        p = 0.0;
  double        Q = 0.0;
  double        r = 0.0;
  std::size_t   segments  = 1000;
  std::uint64_t seed      = 0;
  double        tolerance = 1e-9;
  std::string   output;

  void add(CLI::App &app, std::function<void()> &run, std::ostream &out)
  {
    auto *cmd = app.add_subcommand("bellman-verify", "Check a Bellman candidate on the domain 1 <= psi <= Q");
    cmd->add_option("--candidate", candidate, "builtin:linear or a candidate table file");
    cmd->add_option("--class", cls, "ap or rh (default from the table)");
    cmd->add_option("--p", p, "Class exponent (default from the table)");
    cmd->add_option("--Q", Q, "Domain bound (default from the table)");
    cmd->add_option("--r", r, "Target exponent (default from the table, 1 for builtin:linear)");
    cmd->add_option("--segments", segments, "Number of in-domain segments");
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--tolerance", tolerance, "Relative concavity tolerance");
    cmd->add_option("--output", output, "CSV report path (default stdout)");
    cmd->callback([this, &run, &out] { run = [this, &out] { exec(out); }; });
  }

  void exec(std::ostream &out) const
  {
    ClassKind kind = ClassKind::MuckenhouptA;
    double    pv = p, Qv = Q, rv = r;
    std::optional<BellmanCandidate> cand;
    if (candidate == "builtin:linear") {
      if (cls.empty() || p == 0.0 || Q == 0.0)
        throw PreconditionError("builtin:linear needs --class, --p and --Q");
      kind = parse_class_kind(cls);
      if (rv == 0.0)
        rv = 1.0;
      cand.emplace(linear_candidate(kind, PParam(pv), Qv));
    } else {
      const CandidateTable t = read_candidate_table(fs::path(candidate));
      kind = cls.empty() ? t.kind : parse_class_kind(cls);
      if (pv == 0.0)
        pv = t.p;
      if (Qv == 0.0)
        Qv = t.Q;
      if (rv == 0.0)
        rv = t.r;
      cand.emplace(tabulated_candidate(t, candidate));
    }
    const OmegaDomain domain(kind, PParam(pv), Qv);
    VerifyOptions     opts;
    opts.segments  = segments;
    opts.seed      = seed;
    opts.tolerance = tolerance;
    const auto rep = verify_candidate(domain, *cand, rv, opts);

    const Params params{{"candidate", candidate},         {"class", std::string(to_string(kind))},
                        {"p", fmt_exact(pv)},              {"Q", fmt_exact(Qv)},
                        {"r", fmt_exact(rv)},              {"segments", std::to_string(segments)},
                        {"seed", std::to_string(seed)},    {"tolerance", fmt_exact(tolerance)},
                        {"accuracy", fmt_exact(cand->info().accuracy)}};
    emit(output, out, [&](std::ostream &os) {
      write_header(os, "bellman-verify", params);
      os << "# verdict = " << (rep.passed ? "pass" : "fail") << '\n';
      os << "# segments_tested = " << rep.segments_tested << '\n';
      os << "# segments_rejected = " << rep.segments_rejected << '\n';
      os << "# violations = " << rep.violations.size() << '\n';
      os << "# boundary_max_error = " << fmt_exact(rep.boundary_max_error) << " at (" << fmt_exact(rep.boundary_worst.x1)
         << ", " << fmt_exact(rep.boundary_worst.x2) << "), tolerance " << fmt_exact(rep.boundary_tolerance) << '\n';
      os << "# c_hat = " << fmt_exact(rep.c_hat) << " at (" << fmt_exact(rep.c_hat_at.x1) << ", "
         << fmt_exact(rep.c_hat_at.x2) << ")\n";
      if (!rep.failure.empty())
        os << "# failure = " << rep.failure << '\n';
      write_verification_csv(os, rep);
    });
  }
};

struct ConclusionCmd
{
  std::string cls    = "ap";
  double      p      = 2.0;
  double      Q      = 0.0;
  std::string target = "ap";
  double      q      = 0.0;
  GridArgs    grid;
  double      alpha  = 0.0;
  std::size_t cells  = 0;
  std::string refine_list = "4,4,4";
  unsigned    threads = 0;
  std::string output;

  void add(CLI::App &app, std::function<void()> &run, std::ostream &out)
  {
    auto *cmd = app.add_subcommand("conclusion-check", "Target characteristic along a refinement sequence");
    cmd->add_option("--class", cls, "Hypothesis class: ap or rh")->required();
    cmd->add_option("--p", p, "Hypothesis exponent")->required();
    cmd->add_option("--Q", Q, "Hypothesis characteristic bound")->required();
    cmd->add_option("--target", target, "Target class: ap or rh")->required();
    cmd->add_option("--q", q, "Target exponent")->required();
    grid.add(cmd, false);
    cmd->add_option("--alpha", alpha, "Use the power weight x^alpha instead of grid files");
    cmd->add_option("--cells", cells, "Cells of the coarsest power-weight grid");
    cmd->add_option("--refine", refine_list, "Comma-separated refinement factors");
    cmd->add_option("--threads", threads, "Scan partitions (0 = hardware concurrency)");
    cmd->add_option("--output", output, "CSV output path (default stdout)");
    cmd->callback([this, &run, &out] { run = [this, &out] { exec(out); }; });
  }

  void exec(std::ostream &out) const
  {
    const ClassKind hyp = parse_class_kind(cls);
    const ClassKind tgt = parse_class_kind(target);
    WeightedGrid    g;
    Params params{{"class", std::string(to_string(hyp))}, {"p", fmt_exact(p)}, {"Q", fmt_exact(Q)},
                  {"target", std::string(to_string(tgt))}, {"q", fmt_exact(q)}, {"refine", refine_list}};
    if (!grid.weight.empty()) {
      g = grid.load();
      grid.record(params);
    } else if (cells > 0) {
      g = power_weight_grid(alpha, cells);
      params.emplace_back("alpha", fmt_exact(alpha));
      params.emplace_back("cells", std::to_string(cells));
    } else {
      throw PreconditionError("conclusion-check needs --weight or --alpha with --cells");
    }
    std::vector<unsigned> factors;
    for (auto f : parse_counts(refine_list))
      factors.push_back(static_cast<unsigned>(f));

    const auto rep = theorem_conclusion_check(g, hyp, PParam(p), Q, tgt, q, factors, {}, scan_options(threads));
    emit(output, out, [&](std::ostream &os) {
      write_header(os, "conclusion-check", params);
      os << "# hypothesis_value = " << fmt_exact(rep.hypothesis_value) << '\n';
      os << "# a_lower = " << fmt_exact(rep.range.a_lower) << ", rh_upper = " << fmt_exact(rep.range.rh_upper) << '\n';
      os << "# inside_range = " << (rep.inside_range ? "yes" : "no") << '\n';
      os << "# trend = " << to_string(rep.trend.trend) << '\n';
      os << "# last_relative_change = " << fmt_exact(rep.trend.last_relative_change) << '\n';
      if (rep.trend.increment_ratio)
        os << "# increment_ratio = " << fmt_exact(*rep.trend.increment_ratio) << '\n';
      if (rep.trend.extrapolated)
        os << "# extrapolated = " << fmt_exact(*rep.trend.extrapolated) << '\n';
      os << "cells,value,argmax\n";
      for (std::size_t i = 0; i < rep.values.size(); ++i)
        os << rep.cells[i] << ',' << fmt_exact(rep.values[i]) << ",\"" << to_string(rep.argmax[i]) << "\"\n";
    });
  }
};

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Sharp exponents, box characteristics and Bellman-candidate checks for strong weight classes",
               "strongweights"};
  app.set_version_flag("--version", std::string("strongweights ") + STRONGWEIGHTS_VERSION);
  app.require_subcommand(1);

  std::function<void()> run;
  ExponentsCmd          exponents;
  CharacteristicCmd     characteristic_cmd;
  QScanCmd              qscan;
  GenerateCmd           generate;
  SharpnessCmd          sharpness;
  SplitCmd              split;
  BellmanVerifyCmd      verify;
  ConclusionCmd         conclusion;
  exponents.add(app, run, out);
  characteristic_cmd.add(app, run, out);
  qscan.add(app, run, out);
  generate.add(app, run, out);
  sharpness.add(app, run, out);
  split.add(app, run, out);
  verify.add(app, run, out);
  conclusion.add(app, run, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kPrecondition;
  }

  try {
    if (run)
      run();
    return kOk;
  } catch (const InfeasibleSplit &e) {
    err << "infeasible split: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NumericFailure &e) {
    err << "numeric failure: " << e.what() << " (bracket [" << fmt_exact(e.bracket_lo) << ", "
        << fmt_exact(e.bracket_hi) << "])\n";
    return kNumeric;
  } catch (const CandidateDomainError &e) {
    err << "candidate error: " << e.what() << '\n';
    return kNumeric;
  } catch (const PreconditionError &e) {
    err << "error: " << e.what() << '\n';
    return kPrecondition;
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return kPrecondition;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

} // namespace sw::cli
