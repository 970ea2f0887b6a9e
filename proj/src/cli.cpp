#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fraclab/error.hpp"
#include "fraclab/exec.hpp"
#include "fraclab/fracderiv.hpp"
#include "fraclab/fraclap.hpp"
#include "fraclab/function.hpp"
#include "fraclab/harness.hpp"
#include "fraclab/maximal.hpp"
#include "fraclab/weight.hpp"
#include "fraclab/weights.hpp"

namespace fraclab {

namespace {

struct GridOpts {
  double lo = -4.0;
  double hi = 4.0;
  std::size_t n = 65;
  std::size_t dim = 1;
};

void grid_options(CLI::App* cmd, GridOpts& g, bool with_dim) {
  cmd->add_option("--lo", g.lo, "grid start")->capture_default_str();
  cmd->add_option("--hi", g.hi, "grid end")->capture_default_str();
  cmd->add_option("--n", g.n, "nodes per axis")->capture_default_str()->check(CLI::Range(2, 100000));
  if (with_dim) cmd->add_option("--dim", g.dim, "dimension")->capture_default_str()->check(CLI::Range(1, 3));
}

void deliver(const std::string& body, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << body;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  f << body;
  f.flush();
  if (!f) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

std::string point_header(std::size_t dim, const std::string& tail) {
  std::string h = dim == 1 ? "x" : "x1";
  for (std::size_t d = 1; d < dim; ++d) h += ",x" + std::to_string(d + 1);
  return h + "," + tail + "\n";
}

std::string point_rows(std::size_t dim, const std::vector<double>& pts, const std::vector<double>& a,
                       const std::vector<double>& b) {
  std::string s;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t d = 0; d < dim; ++d) s += format_double(pts[k * dim + d]) + ",";
    s += format_double(a[k]) + "," + format_double(b[k]) + "\n";
  }
  return s;
}

int code_for(const Error& e) { return is_numerical(e.kind()) ? 2 : 1; }

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  apply_thread_limit_from_env();
  CLI::App app{"fraclab: fractional derivatives, fractional Laplacians, maximal functions and weights"};
  app.require_subcommand(1);

  auto* cat = app.add_subcommand("catalog", "list function and weight names");

  std::string fn, side = "left", out_path, method = "semigroup", weight, op = "minus", config, format;
  double alpha = 0.5, s = 0.5, p = 2.0;
  int jmin = -6, jmax = 6;
  GridOpts g;

  auto* fd = app.add_subcommand("frac-deriv", "Marchaud derivative (or Weyl integral) on a grid");
  fd->add_option("--fn", fn, "catalog function, e.g. gaussian or bump(0,1)")->required();
  fd->add_option("--alpha", alpha, "order in (0,1)")->required();
  fd->add_option("--side", side, "left, right or weyl")->capture_default_str()
      ->check(CLI::IsMember({"left", "right", "weyl"}));
  fd->add_option("--out", out_path, "output CSV (stdout when omitted)");
  grid_options(fd, g, false);

  auto* fl = app.add_subcommand("frac-laplacian", "fractional Laplacian on a grid");
  fl->add_option("--fn", fn, "catalog function")->required();
  fl->add_option("--s", s, "order in (0,1)")->required();
  fl->add_option("--method", method, "semigroup, pv or spectral")->capture_default_str()
      ->check(CLI::IsMember({"semigroup", "pv", "spectral"}));
  fl->add_option("--out", out_path, "output CSV (stdout when omitted)");
  grid_options(fl, g, true);

  auto* wc = app.add_subcommand("weights", "weight class constants over a dyadic lattice");
  wc->add_option("--weight", weight, "catalog weight, e.g. exp_decay(1)")->required();
  wc->add_option("--p", p, "exponent >= 1")->capture_default_str();
  wc->add_option("--jmin", jmin, "smallest scale 2^jmin")->capture_default_str();
  wc->add_option("--jmax", jmax, "largest scale 2^jmax")->capture_default_str();
  wc->add_option("--out", out_path, "output CSV (stdout when omitted)");
  grid_options(wc, g, true);

  auto* mx = app.add_subcommand("maximal", "one-sided or centered maximal function on a grid");
  mx->add_option("--fn", fn, "catalog function")->required();
  mx->add_option("--op", op, "minus, plus or hl")->capture_default_str()
      ->check(CLI::IsMember({"minus", "plus", "hl"}));
  mx->add_option("--jmin", jmin, "smallest scale 2^jmin")->capture_default_str();
  mx->add_option("--jmax", jmax, "largest scale 2^jmax")->capture_default_str();
  mx->add_option("--out", out_path, "output CSV (stdout when omitted)");
  grid_options(mx, g, true);

  auto* sw = app.add_subcommand("sweep", "run an experiment described by a config file");
  sw->add_option("--config", config, "config file ([experiment], [grid], [quadrature], [output])")->required();
  sw->add_option("--out", out_path, "override output path");
  sw->add_option("--format", format, "override format: csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cat->parsed()) {
      out << "functions:\n";
      for (const auto& n : function_catalog()) out << "  " << n << "\n";
      out << "weights:\n";
      for (const auto& n : weight_catalog()) out << "  " << n << "\n";
      return 0;
    }
    if (fd->parsed()) {
      const auto f = sample(parse_entry(fn), Grid1D(g.lo, g.hi, g.n));
      const auto a = FracOrder::alpha(alpha);
      const FracDerivResult r = side == "left"    ? marchaud_left(f, a)
                                : side == "right" ? marchaud_right(f, a)
                                                  : weyl_integral(f, a);
      deliver(point_header(1, "value,error") + point_rows(1, r.t, r.values, r.error), out_path, out);
      return 0;
    }
    if (fl->parsed()) {
      const auto f = sample(parse_entry(fn), GridND(Grid1D(g.lo, g.hi, g.n), g.dim));
      const auto so = FracOrder::s(s, static_cast<int>(g.dim));
      const auto r = frac_laplacian(f, std::span<const FracOrder>(&so, 1), parse_lap_method(method))[0];
      deliver(point_header(g.dim, "value,error") + point_rows(g.dim, r.points, r.values, r.error), out_path, out);
      return 0;
    }
    if (wc->parsed()) {
      const Weight w = make_weight(weight, g.dim);
      const auto lat = LatticeSpec::on_grid(GridND(Grid1D(g.lo, g.hi, g.n), g.dim), jmin, jmax);
      std::string body = "estimator,value,argmax_h\n";
      auto line = [&](const char* name, const WeightConstant& c) {
        body += std::string(name) + "," + format_double(c.value) + "," + format_double(c.argmax_h) + "\n";
      };
      if (g.dim == 1) {
        line("sawyer_minus", sawyer_minus_constant(w, p, lat));
        line("sawyer_plus", sawyer_plus_constant(w, p, lat));
      }
      try {
        line("muckenhoupt", muckenhoupt_constant(w, p, lat));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::IntegralOverflow) throw;
        body += "muckenhoupt,inf,\n";
      }
      deliver(body, out_path, out);
      return 0;
    }
    if (mx->parsed()) {
      const auto lat = ScaleLattice::dyadic(jmin, jmax);
      MaximalResult r;
      if (op == "hl") {
        r = m_hl(sample(parse_entry(fn), GridND(Grid1D(g.lo, g.hi, g.n), g.dim)), lat);
      } else {
        if (g.dim != 1) throw Error(ErrorKind::ConfigInvalid, "one-sided maximal functions need --dim 1");
        const auto f = sample(parse_entry(fn), Grid1D(g.lo, g.hi, g.n));
        r = op == "minus" ? m_minus(f, lat) : m_plus(f, lat);
      }
      deliver(point_header(r.dim, "value,scale") + point_rows(r.dim, r.points, r.values, r.lattice), out_path, out);
      return 0;
    }
    if (sw->parsed()) {
      ExperimentConfig c = load_config(config);
      if (!out_path.empty()) c.output = out_path;
      if (!format.empty()) c.format = format;
      const SweepReport rep = run(c);
      deliver(emit(rep, parse_format(c.format)), c.output, out);
      return 0;
    }
  } catch (const Error& e) {
    err << "fraclab: " << e.what() << "\n";
    return code_for(e);
  } catch (const std::exception& e) {
    err << "fraclab: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace fraclab
