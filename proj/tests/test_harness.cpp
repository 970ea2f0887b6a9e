#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fraclab/error.hpp"
#include "fraclab/harness.hpp"

using namespace fraclab;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::IoError;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "fraclab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("fraclab_test_" + name)).string();
}

const char* kDerivConfig = R"([experiment]
name = deriv_limits
function = gaussian
weight = exp_decay(1)
p = 2
orders = 0.5, 0.9, 0.99

[grid]
lo = -4
hi = 4
points = 33
window = -3, 3

[quadrature]
exec = serial
)";

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto c = parse_config(kDerivConfig);
  CHECK(c.experiment == Experiment::deriv_limits);
  CHECK(c.orders == std::vector<double>{0.5, 0.9, 0.99});
  CHECK(c.weight == "exp_decay(1)");
  REQUIRE(c.grid.window.has_value());
  CHECK(c.grid.window->lo == -3.0);
  CHECK(c.quad.exec == Exec::serial);

  SUBCASE("canonical text round trip") {
    const std::string t = to_config_text(c);
    CHECK(to_config_text(parse_config(t)) == t);
  }
  SUBCASE("multiples of pi") {
    const auto d = parse_config("[experiment]\norders = 0.5\n[grid]\nlo = -pi\nhi = 2*pi\n");
    CHECK(d.grid.lo == -std::numbers::pi);
    CHECK(d.grid.hi == 2 * std::numbers::pi);
  }
  SUBCASE("rejections") {
    auto bad = [](const std::string& t) { return kind_of([&] { parse_config(t); }); };
    CHECK(bad("[experiment]\norders =\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("[experiment]\norders = 0.5\np = 0.5\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("[experiment]\norders = 0.5, 1\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("[experiment]\norders = 0.5\nfunction = sawtooth\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("[experiment]\norders = 0.5\nweight = nope\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("[experiment]\norders = 0.5\ncolour = red\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("[plots]\nx = 1\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("[experiment]\norders = 0.5\n[grid]\npoints = x\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("[experiment]\nname = fly\n") == ErrorKind::ConfigInvalid);
    CHECK(bad("orders = 0.5\n") == ErrorKind::ConfigInvalid);
  }
  SUBCASE("experiments without orders") {
    CHECK_NOTHROW(parse_config("[experiment]\nname = weight_scan\nweight = exp_decay(1)\n"));
  }
  CHECK(kind_of([] { load_config("/nonexistent/x.conf"); }) == ErrorKind::IoError);
}

TEST_CASE("emit and parse reports") {
  SweepReport r;
  CHECK(emit(r, ReportFormat::csv) == "order,metric,value,error\n");
  r.rows = {{0.5, "a", 1.0, 0.0}, {0.9, "plain", 0.1, 1e-12}, {0.99, "odd, \"quoted\"", -2.5e-300, 3.0}};
  r.metadata = {{"k", "v"}, {"grid", "33 nodes on [-4,4]"}};
  const std::string csv = emit(r, ReportFormat::csv);
  CHECK(count_lines(csv) == 4);
  CHECK(csv.find("\"odd, \"\"quoted\"\"\"") != std::string::npos);
  const auto back = parse_report(csv, ReportFormat::csv);
  CHECK(back.rows == r.rows);
  CHECK(emit(back, ReportFormat::csv) == csv);

  const std::string js = emit(r, ReportFormat::json);
  const auto jb = parse_report(js, ReportFormat::json);
  CHECK(jb == r);
  CHECK(emit(jb, ReportFormat::json) == js);

  SweepReport bad = r;
  bad.rows[1].value = std::nan("");
  CHECK(kind_of([&] { emit(bad, ReportFormat::csv); }) == ErrorKind::IoError);
  CHECK(kind_of([&] { parse_report("order,metric\n", ReportFormat::csv); }) == ErrorKind::IoError);
  CHECK(kind_of([&] { parse_report("order,metric,value,error\n1,a,x,0\n", ReportFormat::csv); }) ==
        ErrorKind::IoError);
  CHECK(kind_of([&] { parse_report("{", ReportFormat::json); }) == ErrorKind::IoError);
  CHECK(kind_of([&] { write_report(r, ReportFormat::csv, "/nonexistent/dir/r.csv"); }) == ErrorKind::IoError);
}

TEST_CASE("deriv_limits run: three rows, decreasing, deterministic, reproducible metadata") {
  const auto c = parse_config(kDerivConfig);
  const auto rep = run(c);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) CHECK(row.metric == "lp_error_to_derivative");
  CHECK(rep.rows[1].value < rep.rows[0].value);
  CHECK(rep.rows[2].value < rep.rows[1].value);
  CHECK(emit(run(c), ReportFormat::csv) == emit(rep, ReportFormat::csv));
  CHECK(emit(run(c), ReportFormat::json) == emit(rep, ReportFormat::json));

  // rebuild the config from the metadata echo alone
  std::map<std::string, std::string> sections;
  std::vector<std::string> order;
  for (const auto& [k, v] : rep.metadata) {
    const auto dot = k.find('.');
    if (dot == std::string::npos) continue;
    const std::string sec = k.substr(0, dot);
    if (!sections.count(sec)) order.push_back(sec);
    sections[sec] += k.substr(dot + 1) + " = " + v + "\n";
  }
  std::string text;
  for (const auto& s : order) text += "[" + s + "]\n" + sections[s];
  CHECK(to_config_text(parse_config(text)) == to_config_text(c));
  bool has_version = false;
  for (const auto& [k, v] : rep.metadata) has_version |= k == "artifact_version" && v == artifact_version();
  CHECK(has_version);
}

TEST_CASE("ftfc run on the bump") {
  const auto rep = run(parse_config("[experiment]\nname = ftfc\nfunction = bump\norders = 0.5\n"));
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].metric == "sup_distance");
  CHECK(rep.rows[0].value <= 1e-4);
}

TEST_CASE("weight_scan run on e^{-t}") {
  const auto rep = run(parse_config(
      "[experiment]\nname = weight_scan\nweight = exp_decay(1)\n[grid]\nlo=-2\nhi=2\npoints=5\nlattice_jmin=-3\n"
      "lattice_jmax=5\n[quadrature]\nexec = serial\n"));
  double minus = 0.0, two = 0.0;
  for (const auto& r : rep.rows) {
    if (r.metric == "sawyer_minus") minus = std::max(minus, r.value);
    if (r.metric == "muckenhoupt") two = std::max(two, r.value);
  }
  CHECK(minus <= 1.0 + 1e-9);
  CHECK(two > 1e3);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i - 1].order <= rep.rows[i].order);

  SUBCASE("seeded center subsample is reproducible") {
    const std::string t =
        "[experiment]\nname = weight_scan\nweight = power(0.5)\nseed = 7\n[grid]\nlo=-2\nhi=2\npoints=41\n"
        "sample_centers = 5\nlattice_jmin=-2\nlattice_jmax=2\n";
    CHECK(emit(run(parse_config(t)), ReportFormat::csv) == emit(run(parse_config(t)), ReportFormat::csv));
  }
}

TEST_CASE("semigroup_suite and oracle_xcheck runs") {
  const auto suite = run(parse_config(
      "[experiment]\nname = semigroup_suite\nfunction = gaussian\n[grid]\nlo=-3\nhi=3\npoints=13\n"));
  std::size_t passed = 0, items = 0;
  for (const auto& r : suite.rows)
    if (r.metric == "passed") {
      ++items;
      passed += r.value == 1.0;
    }
  CHECK(items == 8);
  CHECK(passed == items);

  const auto x = run(parse_config(
      "[experiment]\nname = oracle_xcheck\nfunction = cosine(2)\norders = 0.25, 0.75\n[grid]\nlo=-pi\nhi=pi\n"
      "points=17\n"));
  for (const auto& r : x.rows) {
    INFO(r.metric << " s=" << r.order);
    CHECK(r.value < 1e-5);
  }
  CHECK(x.rows.size() == 8);
}

TEST_CASE("module errors carry the experiment name") {
  try {
    run(parse_config("[experiment]\nname = lap_limits\nfunction = exp_growth\norders = 0.5\n"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TailDivergence);
    CHECK(std::string(e.what()).find("experiment lap_limits") != std::string::npos);
  }
}

TEST_CASE("cli exit codes and outputs") {
  std::string out, err;
  CHECK(cli({"catalog"}, &out) == 0);
  const auto fpos = out.find("functions:"), wpos = out.find("weights:");
  REQUIRE(fpos != std::string::npos);
  REQUIRE(wpos != std::string::npos);
  CHECK(count_lines(out.substr(fpos, wpos - fpos)) - 1 >= 7);
  CHECK(count_lines(out.substr(wpos)) - 1 >= 4);

  CHECK(cli({"sweep", "--config", "/nonexistent/missing.conf"}, nullptr, &err) == 1);
  CHECK(err.find("cannot read config") != std::string::npos);
  CHECK(cli({"bogus"}) == 1);
  CHECK(cli({}) == 1);
  CHECK(cli({"frac-deriv", "--fn", "gaussian"}) == 1);
  CHECK(cli({"frac-deriv", "--fn", "nope", "--alpha", "0.5"}) == 1);
  CHECK(cli({"frac-deriv", "--fn", "gaussian", "--alpha", "1.5"}) == 1);
  CHECK(cli({"--help"}) == 0);

  const std::string path = tmp_path("deriv.csv");
  std::remove(path.c_str());
  CHECK(cli({"frac-deriv", "--fn", "gaussian", "--alpha", "0.5", "--n", "17", "--out", path}) == 0);
  std::ifstream in(path);
  std::stringstream body;
  body << in.rdbuf();
  CHECK(count_lines(body.str()) == 18);
  CHECK(body.str().rfind("x,value,error\n", 0) == 0);

  // numerical failure: Weyl integral of a non-decaying input
  CHECK(cli({"frac-deriv", "--fn", "cosine", "--alpha", "0.5", "--side", "weyl", "--n", "5"}, nullptr, &err) == 2);
  CHECK(cli({"frac-laplacian", "--fn", "exp_growth", "--s", "0.5", "--n", "5"}) == 2);

  std::string a, b;
  CHECK(cli({"frac-laplacian", "--fn", "gaussian", "--s", "0.5", "--n", "9", "--method", "pv"}, &a) == 0);
  CHECK(cli({"frac-laplacian", "--fn", "gaussian", "--s", "0.5", "--n", "9", "--method", "pv"}, &b) == 0);
  CHECK(a == b);
  CHECK(count_lines(a) == 10);

  CHECK(cli({"weights", "--weight", "exp_decay(1)", "--n", "5", "--jmin", "-2", "--jmax", "4"}, &out) == 0);
  CHECK(out.find("sawyer_minus,") != std::string::npos);
  CHECK(cli({"maximal", "--fn", "bump", "--op", "minus", "--n", "9"}, &out) == 0);
  CHECK(count_lines(out) == 10);
  CHECK(cli({"maximal", "--fn", "bump", "--op", "plus", "--dim", "2", "--n", "5"}) == 1);

  const std::string cfg = tmp_path("sweep.conf"), rep = tmp_path("sweep.json");
  {
    std::ofstream f(cfg);
    f << "[experiment]\nname = ftfc\nfunction = bump\norders = 0.5\n[output]\nformat = json\npath = " << rep << "\n";
  }
  CHECK(cli({"sweep", "--config", cfg}) == 0);
  std::ifstream rj(rep);
  std::stringstream js;
  js << rj.rdbuf();
  CHECK(parse_report(js.str(), ReportFormat::json).rows.size() == 1);
}
