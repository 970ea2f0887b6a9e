// One PASS/FAIL line per acceptance criterion. Exit status 1 when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/error.hpp"
#include "fraclab/fracderiv.hpp"
#include "fraclab/fraclap.hpp"
#include "fraclab/harness.hpp"
#include "fraclab/maximal.hpp"
#include "fraclab/special.hpp"
#include "fraclab/weights.hpp"

using namespace fraclab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void need(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    o.detail += " FAILED(" + what + ")";
  }
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// 1
Outcome eigenfunctions() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double lam : {0.5, 1.0, 2.0}) {
    const auto f = make_function("exp_growth(" + format_double(lam) + ")");
    for (double a : {0.25, 0.5, 0.75}) {
      const double got = marchaud_left_at(*f, 0.0, FracOrder::alpha(a)).value;
      worst = std::max(worst, std::abs(got / std::pow(lam, a) - 1.0));
    }
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail = "max rel err " + fmt(worst) + ", " + fmt(sec) + " s";
  need(o, worst <= 1e-6, "rel err");
  need(o, sec < 10.0, "runtime");
  return o;
}

// 2
Outcome ftfc() {
  Outcome o;
  double worst = 0.0, worst_ratio = 0.0;
  for (const char* fn : {"bump", "gaussian"})
    for (double a : {0.25, 0.5, 0.75}) {
      const auto f = make_function(fn);
      const double d = ftfc_compose(f, FracOrder::alpha(a), {}, 32).sup_distance;
      const double d2 = ftfc_compose(f, FracOrder::alpha(a), {}, 64).sup_distance;
      worst = std::max(worst, d);
      worst_ratio = std::max(worst_ratio, d2 / d);
    }
  o.detail = "max sup distance " + fmt(worst) + ", worst refinement ratio " + fmt(worst_ratio);
  need(o, worst <= 1e-4, "distance");
  need(o, worst_ratio <= 0.5, "halving");
  return o;
}

SweepReport sweep(const std::string& text) { return run(parse_config(text)); }

// 3
Outcome alpha_limits() {
  Outcome o;
  for (const char* p : {"1", "2"})
    for (const char* end : {"one", "zero"}) {
      const bool up = std::string(end) == "one";
      const auto r = sweep(std::string("[experiment]\nname = deriv_limits\nfunction = gaussian\nweight = exp_decay(1)\n") +
                           "p = " + p + "\nlimit = " + end + "\norders = " +
                           (up ? "0.5,0.9,0.99,0.999" : "0.001,0.01,0.1,0.5") +
                           "\n[grid]\nlo = -4\nhi = 4\npoints = 33\nwindow = -3, 3\n");
      auto e = r.series(up ? "lp_error_to_derivative" : "lp_error_to_function");
      if (!up) std::reverse(e.begin(), e.end());  // walk toward 0
      const double red = e.back() / e.front();
      o.detail += std::string(" p=") + p + (up ? " a->1 " : " a->0 ") + fmt(red);
      need(o, e.size() == 4 && strictly_decreasing(e), std::string("monotone p=") + p + " " + end);
      need(o, red <= 0.05, std::string("reduction p=") + p + " " + end);
    }
  return o;
}

// 4
Outcome s_limits() {
  Outcome o;
  for (const char* dim : {"1", "2"})
    for (const char* w : {"constant", "power(0.5)"})
      for (const char* end : {"one", "zero"}) {
        const bool up = std::string(end) == "one";
        const bool two = std::string(dim) == "2";
        const auto r = sweep(std::string("[experiment]\nname = lap_limits\nfunction = gaussian\nweight = ") + w +
                             "\np = 2\nlimit = " + end + "\norders = " +
                             (up ? "0.5,0.9,0.99,0.999" : "0.001,0.01,0.1,0.5") + "\n[grid]\ndim = " + dim +
                             (two ? "\nlo = -3\nhi = 3\npoints = 13\n" : "\nlo = -3\nhi = 3\npoints = 31\n"));
        auto e = r.series(up ? "lp_error_to_laplacian" : "lp_error_to_function");
        if (!up) std::reverse(e.begin(), e.end());
        const double red = e.back() / e.front();
        const std::string tag = std::string(" n=") + dim + " " + w + (up ? " s->1 " : " s->0 ");
        o.detail += tag + fmt(red);
        need(o, e.size() == 4 && strictly_decreasing(e), "monotone" + tag);
        need(o, red <= 0.05, "reduction" + tag);
      }
  return o;
}

double max_row(const SweepReport& r, const std::string& metric) {
  double m = 0.0;
  for (double v : r.series(metric)) m = std::max(m, v);
  return m;
}

// 5
Outcome method_agreement() {
  Outcome o;
  double g1 = max_row(sweep("[experiment]\nname = oracle_xcheck\nfunction = gaussian\norders = 0.25,0.5,0.75\n"
                            "[grid]\nlo = -3\nhi = 3\npoints = 25\nwindow = -2, 2\n"),
                      "semigroup_vs_pv");
  double g2 = max_row(sweep("[experiment]\nname = oracle_xcheck\nfunction = gaussian\norders = 0.25,0.5,0.75\n"
                            "[grid]\ndim = 2\nlo = -3\nhi = 3\npoints = 13\nwindow = -2, 2\n"),
                      "semigroup_vs_pv");
  double sg = 0.0, pv = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const auto r = sweep("[experiment]\nname = oracle_xcheck\nfunction = cosine(" + std::to_string(k) +
                         ")\norders = 0.25,0.5,0.75\n[grid]\nlo = -pi\nhi = pi\npoints = 33\n");
    sg = std::max(sg, max_row(r, "semigroup_vs_spectral"));
    pv = std::max(pv, max_row(r, "pv_vs_spectral"));
  }
  o.detail = "gaussian |semigroup-pv| n=1 " + fmt(g1) + " n=2 " + fmt(g2) + "; cos vs spectral: semigroup " +
             fmt(sg) + " pv " + fmt(pv);
  need(o, g1 <= 1e-5 && g2 <= 1e-5, "gaussian");
  need(o, sg <= 1e-5 && pv <= 1e-5, "cosine");
  return o;
}

std::vector<double> lattice(double step) {
  std::vector<double> a;
  for (double v = 0.05; v <= 0.95 + 1e-12; v += step) a.push_back(std::round(v * 1e6) / 1e6);
  return a;
}

double rel_change(double a, double b) {
  if (a == 0.0 && b == 0.0) return 0.0;
  return std::abs(b - a) / std::max(std::abs(a), std::abs(b));
}

// 6
Outcome maximal_domination() {
  Outcome o;
  const auto lat = ScaleLattice::dyadic(-10, 10);
  const auto coarse_a = lattice(0.05), fine_a = lattice(0.025);
  double worst_a = 0.0, worst_s = 0.0;
  for (const char* fn : {"gaussian", "bump", "exp_growth", "cosine", "heat_kernel", "constant"}) {
    const auto c = sample(parse_entry(fn), Grid1D(-2, 2, 17));
    const auto f = sample(parse_entry(fn), Grid1D(-2, 2, 33));
    const Window win{-1.5, 1.5};
    const double rc = order_sup_fracderiv(c, coarse_a, lat, {}, win).constant;
    const double rf = order_sup_fracderiv(f, fine_a, lat, {}, win).constant;
    worst_a = std::max(worst_a, rel_change(rc, rf));
    o.detail += std::string(" ") + fn + ":" + fmt(rc) + "->" + fmt(rf);
  }
  const std::vector<double> eps{0.5, 0.25, 0.125, 0.0625, 0.03125};
  for (std::size_t n : {1u, 2u})
    for (const char* fn : {"gaussian", "bump", "cosine", "heat_kernel", "constant"}) {
      const std::size_t pc = 9, pf = 2 * pc - 1;
      const auto c = sample(parse_entry(fn), GridND(Grid1D(-1, 1, pc), n));
      const auto f = sample(parse_entry(fn), GridND(Grid1D(-1, 1, pf), n));
      const Window win{-0.5, 0.5};
      const double rc = order_sup_fraclap(c, coarse_a, eps, lat, {}, win).constant;
      const double rf = order_sup_fraclap(f, fine_a, eps, lat, {}, win).constant;
      worst_s = std::max(worst_s, rel_change(rc, rf));
      o.detail += " n=" + std::to_string(n) + " " + fn + ":" + fmt(rc) + "->" + fmt(rf);
    }
  o.detail = "worst change Ma " + fmt(worst_a) + ", Ms " + fmt(worst_s) + ";" + o.detail;
  need(o, worst_a <= 0.05, "Ma");
  need(o, worst_s <= 0.05, "Ms");
  return o;
}

// 7
Outcome weight_classes() {
  Outcome o;
  const auto lat = LatticeSpec::on_grid(Grid1D(-2, 2, 5));
  const Weight e = make_weight("exp_decay(1)");
  const double minus = sawyer_minus_constant(e, 2.0, lat).value;
  double two = 0.0;
  for (const auto& r : weight_scan(e, 2.0, WeightSide::two_sided, lat).rows) two = std::max(two, r.product);
  const Weight one = make_weight("constant(1)");
  const double a = sawyer_minus_constant(one, 2.0, lat).value, b = sawyer_plus_constant(one, 2.0, lat).value,
               c = muckenhoupt_constant(one, 2.0, lat).value, d = a1_minus_ratio(one, Grid1D(-2, 2, 5)).ratio;
  o.detail = "Sawyer- " + format_double(minus) + ", two-sided max " + fmt(two) + ", constant weight " +
             format_double(a) + " " + format_double(b) + " " + format_double(c) + " " + format_double(d);
  need(o, minus <= 1.0 + 1e-9, "one-sided");
  need(o, two > 1e3, "two-sided");
  need(o, a == 1.0 && b == 1.0 && c == 1.0 && d == 1.0, "constant weight");
  return o;
}

// 8
Outcome semigroup_suite() {
  Outcome o;
  const Weight one1 = make_weight("constant"), one2 = make_weight("constant", 2);
  const struct {
    const char* fn;
    std::size_t dim;
    std::size_t points;
  } cases[] = {{"gaussian", 1, 25}, {"heat_kernel", 1, 25}, {"gaussian", 2, 9}, {"heat_kernel", 2, 9}};
  for (const auto& c : cases) {
    const auto f = sample(parse_entry(c.fn), GridND(Grid1D(-3, 3, c.points), c.dim));
    const auto r = semigroup_property_suite(f, c.dim == 1 ? one1 : one2);
    std::string failed;
    double residual = 0.0, comp = 0.0;
    for (const auto& it : r.items) {
      if (!it.passed) failed += " " + it.id;
      if (it.id == "2") residual = it.value;
      if (it.id == "composition") comp = it.value;
    }
    o.detail += std::string(" ") + c.fn + " n=" + std::to_string(c.dim) + ": residual " + fmt(residual) +
                " composition " + fmt(comp) + (failed.empty() ? "" : " failing" + failed);
    need(o, failed.empty(), c.fn);
    need(o, residual <= 1e-6 && comp <= 1e-8, std::string(c.fn) + " thresholds");
  }
  return o;
}

// 9
Outcome special_functions() {
  Outcome o;
  double worst = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double x = -1.0 + 11.0 * k / 1000.0;
    if (std::abs(x) < 1e-9 || x >= 10.0) continue;
    const double lhs = fraclab::gamma(x + 1.0), rhs = x * fraclab::gamma(x);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  need(o, worst <= 1e-9, "recurrence");
  o.detail = "recurrence " + fmt(worst);
  for (int n : {1, 2}) {
    double lo = 1e300, hi = 0.0;
    for (int k = 0; k <= 98; ++k) {
      const double s = 0.01 + 0.01 * k;
      const double q = cns(n, s) / (s * (1 - s));
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    const double mid = std::sqrt(lo * hi);
    o.detail += ", n=" + std::to_string(n) + " max/min " + fmt(hi / lo);
    need(o, lo >= mid / 2 && hi <= 2 * mid, "band n=" + std::to_string(n));
  }
  return o;
}

// 10
Outcome domination() {
  Outcome o;
  const auto lat = dense_lattice(1.0 / 64, 64.0);
  double worst = -1e300;
  std::size_t checks = 0;
  for (const auto& fn : function_catalog()) {
    const auto f1 = sample(parse_entry(fn), Grid1D(-2, 2, 9));
    for (const auto& k : {box_kernel(), inverse_sqrt_kernel(), exp_kernel()}) {
      const auto r = lorente_domination_check(f1, k, lat);
      worst = std::max(worst, r.max_excess - r.tolerance);
      ++checks;
      need(o, r.holds, fn + "/" + k.name);
    }
    for (std::size_t n : {1u, 2u}) {
      const auto fn_n = sample(parse_entry(fn), GridND(Grid1D(-1, 1, n == 1 ? 9 : 3), n));
      for (const auto& k : {heat_kernel_profile(n, 0.5), unit_ball_kernel(n), exp_radial_kernel(n)}) {
        try {
          const auto r = radial_domination_check(fn_n, k, dense_lattice(1.0 / 16, 16.0));
          worst = std::max(worst, r.max_excess - r.tolerance);
          ++checks;
          need(o, r.holds, fn + "/" + k.name + " n=" + std::to_string(n));
        } catch (const Error& e) {
          // f * eta diverges: e^{x} against e^{-|x|}
          if (e.kind() != ErrorKind::TailDivergence) throw;
          o.detail += " skipped " + fn + "/" + k.name;
        }
      }
    }
  }
  o.detail = std::to_string(checks) + " checks, max excess over tolerance " + fmt(worst) + ";" + o.detail;
  return o;
}

// 11
Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fraclab_acceptance";
  fs::create_directories(dir);
  auto call = [](std::vector<std::string> args) {
    args.insert(args.begin(), "fraclab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const fs::path cfg = dir / "limits.conf";
  std::ofstream(cfg) << "[experiment]\nname = deriv_limits\nfunction = gaussian\nweight = exp_decay(1)\n"
                        "orders = 0.5, 0.9\n[grid]\npoints = 17\n";
  bool same = true;
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"sweep", "--config", cfg.string()},
           {"frac-deriv", "--fn", "bump", "--alpha", "0.3", "--n", "17"},
           {"frac-laplacian", "--fn", "gaussian", "--s", "0.5", "--n", "9", "--dim", "2", "--method", "pv"}}) {
    std::vector<std::string> a = args, b = args;
    a.insert(a.end(), {"--out", (dir / "a.csv").string()});
    b.insert(b.end(), {"--out", (dir / "b.csv").string()});
    fs::remove(dir / "a.csv");
    fs::remove(dir / "b.csv");
    const bool ok = call(a) == 0 && call(b) == 0;
    const std::string x = slurp(dir / "a.csv");
    same = same && ok && !x.empty() && x == slurp(dir / "b.csv");
  }
  const int c_ok = call({"catalog"}), c_cfg = call({"sweep", "--config", (dir / "missing.conf").string()}),
            c_num = call({"frac-laplacian", "--fn", "exp_growth", "--s", "0.5", "--n", "5"});
  o.detail = std::string("byte-identical ") + (same ? "yes" : "no") + ", exit codes catalog " +
             std::to_string(c_ok) + " missing config " + std::to_string(c_cfg) + " divergent " +
             std::to_string(c_num);
  need(o, same, "determinism");
  need(o, c_ok == 0 && c_cfg == 1 && c_num == 2, "exit codes");
  return o;
}

}  // namespace

int main() {
  apply_thread_limit_from_env();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"eigenfunction exactness", eigenfunctions},
      {"derivative of the fractional integral", ftfc},
      {"alpha limits", alpha_limits},
      {"s limits", s_limits},
      {"semigroup, pv and spectral agreement", method_agreement},
      {"maximal domination stable under refinement", maximal_domination},
      {"one-sided vs two-sided weight classes", weight_classes},
      {"heat semigroup suite", semigroup_suite},
      {"special functions", special_functions},
      {"kernel domination by maximal functions", domination},
      {"determinism and exit codes", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw ") + e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), sec);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
