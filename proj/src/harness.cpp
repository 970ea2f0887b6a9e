#include "fraclab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "fraclab/error.hpp"
#include "fraclab/fracderiv.hpp"
#include "fraclab/fraclap.hpp"
#include "fraclab/function.hpp"
#include "fraclab/maximal.hpp"
#include "fraclab/weight.hpp"
#include "fraclab/weights.hpp"

namespace fraclab {

namespace {

constexpr const char* kVersion = "1.0.0";

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// plain numbers, plus "pi", "2pi", "-0.5*pi"
double parse_real(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  double mult = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    mult = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    if (s.empty() || s == "+") s = "1";
    if (s == "-") s = "-1";
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    bad(key + ": not a number: '" + raw + "'");
  }
  if (used != s.size()) bad(key + ": not a number: '" + raw + "'");
  v *= mult;
  if (!std::isfinite(v)) bad(key + ": not finite");
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& raw) {
  const double v = parse_real(key, raw);
  if (v < 0 || v != std::floor(v) || v > 1e12) bad(key + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

int parse_int(const std::string& key, const std::string& raw) {
  const double v = parse_real(key, raw);
  if (v != std::floor(v) || std::abs(v) > 1e6) bad(key + ": expected an integer");
  return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    bad("seed: expected an unsigned integer");
  }
  if (used != s.size() || s.empty() || s[0] == '-') bad("seed: expected an unsigned integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad(key + ": expected true or false");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_real(key, item));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

const char* to_string(LimitEnd e) {
  switch (e) {
    case LimitEnd::one: return "one";
    case LimitEnd::zero: return "zero";
    case LimitEnd::both: return "both";
  }
  return "one";
}

LimitEnd parse_limit(const std::string& s) {
  if (s == "one") return LimitEnd::one;
  if (s == "zero") return LimitEnd::zero;
  if (s == "both") return LimitEnd::both;
  bad("limit: expected one, zero or both, got '" + s + "'");
}

using Entry = std::tuple<std::string, std::string, std::string>;  // section, key, value

std::vector<Entry> config_entries(const ExperimentConfig& c) {
  std::vector<Entry> e;
  e.emplace_back("experiment", "name", to_string(c.experiment));
  e.emplace_back("experiment", "function", c.function);
  e.emplace_back("experiment", "weight", c.weight);
  e.emplace_back("experiment", "p", format_double(c.p));
  e.emplace_back("experiment", "orders", join(c.orders));
  e.emplace_back("experiment", "limit", to_string(c.limit));
  e.emplace_back("experiment", "method", c.method);
  e.emplace_back("experiment", "seed", std::to_string(c.seed));
  const GridConfig& g = c.grid;
  e.emplace_back("grid", "dim", std::to_string(g.dim));
  e.emplace_back("grid", "lo", format_double(g.lo));
  e.emplace_back("grid", "hi", format_double(g.hi));
  e.emplace_back("grid", "points", std::to_string(g.points));
  e.emplace_back("grid", "window", g.window ? format_double(g.window->lo) + "," + format_double(g.window->hi) : "");
  e.emplace_back("grid", "lattice_jmin", std::to_string(g.lattice_jmin));
  e.emplace_back("grid", "lattice_jmax", std::to_string(g.lattice_jmax));
  e.emplace_back("grid", "points_per_scale", format_double(g.points_per_scale));
  e.emplace_back("grid", "sample_centers", std::to_string(g.sample_centers));
  const QuadratureSpec& q = c.quad;
  e.emplace_back("quadrature", "split_point", format_double(q.split_point));
  e.emplace_back("quadrature", "n_singular", std::to_string(q.n_singular));
  e.emplace_back("quadrature", "n_tail", std::to_string(q.n_tail));
  e.emplace_back("quadrature", "tail_radius", q.tail_radius ? format_double(*q.tail_radius) : "");
  e.emplace_back("quadrature", "pv_epsilon_schedule", join(q.pv_epsilon_schedule));
  e.emplace_back("quadrature", "substitution",
                 q.substitution == Substitution::taylor_subtract ? "taylor_subtract" : "log_substitute");
  e.emplace_back("quadrature", "graded_levels", std::to_string(q.graded_levels));
  e.emplace_back("quadrature", "pv_levels", std::to_string(q.pv_levels));
  e.emplace_back("quadrature", "time_levels", std::to_string(q.time_levels));
  e.emplace_back("quadrature", "angular_nodes", std::to_string(q.angular_nodes));
  e.emplace_back("quadrature", "tolerance", format_double(q.tolerance));
  e.emplace_back("quadrature", "exec", q.exec == Exec::serial ? "serial" : "parallel");
  e.emplace_back("output", "path", c.output);
  e.emplace_back("output", "format", c.format);
  e.emplace_back("output", "record_runtime", c.record_runtime ? "true" : "false");
  return e;
}

void set_key(ExperimentConfig& c, const std::string& sec, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  const std::string name = sec + "." + key;
  GridConfig& g = c.grid;
  QuadratureSpec& q = c.quad;
  if (sec == "experiment") {
    if (key == "name" || key == "experiment") c.experiment = parse_experiment(v);
    else if (key == "function") c.function = v;
    else if (key == "weight") c.weight = v;
    else if (key == "p") c.p = parse_real(name, v);
    else if (key == "orders") c.orders = parse_list(name, v);
    else if (key == "limit") c.limit = parse_limit(v);
    else if (key == "method") c.method = v;
    else if (key == "seed") c.seed = parse_seed(v);
    else bad("unknown key " + name);
  } else if (sec == "grid") {
    if (key == "dim") g.dim = parse_count(name, v);
    else if (key == "lo") g.lo = parse_real(name, v);
    else if (key == "hi") g.hi = parse_real(name, v);
    else if (key == "points") g.points = parse_count(name, v);
    else if (key == "window") {
      const auto w = parse_list(name, v);
      if (w.empty()) g.window.reset();
      else if (w.size() == 2) g.window = Window{w[0], w[1]};
      else bad(name + ": expected 'lo, hi'");
    } else if (key == "lattice_jmin") g.lattice_jmin = parse_int(name, v);
    else if (key == "lattice_jmax") g.lattice_jmax = parse_int(name, v);
    else if (key == "points_per_scale") g.points_per_scale = parse_real(name, v);
    else if (key == "sample_centers") g.sample_centers = parse_count(name, v);
    else bad("unknown key " + name);
  } else if (sec == "quadrature") {
    if (key == "split_point") q.split_point = parse_real(name, v);
    else if (key == "n_singular") q.n_singular = parse_count(name, v);
    else if (key == "n_tail") q.n_tail = parse_count(name, v);
    else if (key == "tail_radius") {
      if (v.empty()) q.tail_radius.reset();
      else q.tail_radius = parse_real(name, v);
    } else if (key == "pv_epsilon_schedule") q.pv_epsilon_schedule = parse_list(name, v);
    else if (key == "substitution") {
      if (v == "taylor_subtract") q.substitution = Substitution::taylor_subtract;
      else if (v == "log_substitute") q.substitution = Substitution::log_substitute;
      else bad(name + ": expected taylor_subtract or log_substitute");
    } else if (key == "graded_levels") q.graded_levels = parse_count(name, v);
    else if (key == "pv_levels") q.pv_levels = parse_count(name, v);
    else if (key == "time_levels") q.time_levels = parse_count(name, v);
    else if (key == "angular_nodes") q.angular_nodes = parse_count(name, v);
    else if (key == "tolerance") q.tolerance = parse_real(name, v);
    else if (key == "exec") {
      if (v == "serial") q.exec = Exec::serial;
      else if (v == "parallel") q.exec = Exec::parallel;
      else bad(name + ": expected serial or parallel");
    } else bad("unknown key " + name);
  } else if (sec == "output") {
    if (key == "path") c.output = v;
    else if (key == "format") c.format = v;
    else if (key == "record_runtime") c.record_runtime = parse_bool(name, v);
    else bad("unknown key " + name);
  } else {
    bad("unknown section [" + sec + "]");
  }
}

bool uses_orders(Experiment e) {
  return e != Experiment::weight_scan && e != Experiment::semigroup_suite;
}

// ---- experiments ----

Grid1D axis(const GridConfig& g) { return Grid1D(g.lo, g.hi, g.points); }

SampledFunctionND sampled_nd(const ExperimentConfig& c) {
  return sample(parse_entry(c.function), GridND(axis(c.grid), c.grid.dim));
}

void keep_metrics(SweepReport& rep, LimitEnd end, const char* to_one) {
  if (end == LimitEnd::both) return;
  const std::string want = end == LimitEnd::one ? std::string("lp_error_to_") + to_one : "lp_error_to_function";
  std::erase_if(rep.rows, [&](const ReportRow& r) { return r.metric != want; });
}

SweepReport deriv_limits(const ExperimentConfig& c) {
  if (c.grid.dim != 1) bad("deriv_limits needs grid.dim = 1");
  const auto f = sample(parse_entry(c.function), axis(c.grid));
  auto rep = derivative_limit_sweep(f, c.orders, c.p, make_weight(c.weight, 1), c.quad, c.grid.window);
  keep_metrics(rep, c.limit, "derivative");
  return rep;
}

SweepReport lap_limits(const ExperimentConfig& c) {
  const auto f = sampled_nd(c);
  auto rep = laplacian_limit_sweep(f, c.orders, c.p, make_weight(c.weight, c.grid.dim), c.quad, c.grid.window,
                                   parse_lap_method(c.method));
  keep_metrics(rep, c.limit, "laplacian");
  return rep;
}

void add_maximal_rows(SweepReport& rep, double order, const MaximalResult& m) {
  double top = 0.0;
  for (double v : m.values) top = std::max(top, std::abs(v));
  rep.rows.push_back({order, "ratio_constant", m.constant, 0.0});
  rep.rows.push_back({order, "max_operator", top, 0.0});
  rep.rows.push_back({order, "excluded_points", static_cast<double>(m.excluded), 0.0});
}

SweepReport maximal_ratios(const ExperimentConfig& c) {
  const auto lat = ScaleLattice::dyadic(c.grid.lattice_jmin, c.grid.lattice_jmax);
  SweepReport rep;
  if (c.grid.dim == 1) {
    const auto f = sample(parse_entry(c.function), axis(c.grid));
    for (double a : c.orders)
      add_maximal_rows(rep, a, order_sup_fracderiv(f, std::span<const double>(&a, 1), lat, c.quad, c.grid.window));
  } else {
    const auto f = sampled_nd(c);
    for (double s : c.orders)
      add_maximal_rows(rep, s,
                       order_sup_fraclap(f, std::span<const double>(&s, 1), c.quad.pv_epsilon_schedule, lat, c.quad,
                                         c.grid.window));
  }
  return rep;
}

LatticeSpec scan_lattice(const ExperimentConfig& c) {
  LatticeSpec lat = LatticeSpec::on_grid(GridND(axis(c.grid), c.grid.dim), c.grid.lattice_jmin, c.grid.lattice_jmax);
  const std::size_t n = lat.n_centers();
  if (c.grid.sample_centers == 0 || c.grid.sample_centers >= n) return lat;
  std::vector<std::size_t> all(n), pick;
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::mt19937_64 rng(c.seed);
  std::sample(all.begin(), all.end(), std::back_inserter(pick), c.grid.sample_centers, rng);
  std::vector<double> centers;
  for (std::size_t i : pick)
    for (std::size_t d = 0; d < lat.dim; ++d) centers.push_back(lat.centers[i * lat.dim + d]);
  lat.centers = std::move(centers);
  return lat;
}

void add_scan_rows(SweepReport& rep, const WeightScan& scan, const std::string& metric) {
  std::map<double, std::pair<double, std::size_t>> per_h;  // max finite product, infinite count
  for (const auto& r : scan.rows) {
    auto& slot = per_h.try_emplace(r.h, 0.0, 0).first->second;
    if (std::isfinite(r.product)) slot.first = std::max(slot.first, r.product);
    else ++slot.second;
  }
  for (const auto& [h, v] : per_h) {
    rep.rows.push_back({h, metric, v.first, 0.0});
    if (v.second) rep.rows.push_back({h, metric + "_infinite", static_cast<double>(v.second), 0.0});
  }
}

SweepReport weight_scan_exp(const ExperimentConfig& c) {
  const Weight w = make_weight(c.weight, c.grid.dim);
  const LatticeSpec lat = scan_lattice(c);
  SweepReport rep;
  if (c.grid.dim == 1) {
    add_scan_rows(rep, weight_scan(w, c.p, WeightSide::minus, lat, c.quad), "sawyer_minus");
    add_scan_rows(rep, weight_scan(w, c.p, WeightSide::plus, lat, c.quad), "sawyer_plus");
  }
  add_scan_rows(rep, weight_scan(w, c.p, WeightSide::two_sided, lat, c.quad), "muckenhoupt");
  return rep;
}

SweepReport ftfc(const ExperimentConfig& c) {
  const FunctionPtr f = make_function(c.function, 1);
  SweepReport rep;
  for (double a : c.orders) {
    const auto r = ftfc_compose(f, FracOrder::alpha(a), c.quad, c.grid.points_per_scale);
    rep.rows.push_back({a, "sup_distance", r.sup_distance, 0.0});
  }
  return rep;
}

SweepReport suite(const ExperimentConfig& c) {
  const auto f = sampled_nd(c);
  const auto r = semigroup_property_suite(f, make_weight(c.weight, c.grid.dim), c.p, c.quad, c.grid.window);
  SweepReport rep;
  double k = 0.0;
  for (const auto& it : r.items) {
    k += 1.0;
    rep.rows.push_back({k, "check_" + it.id, it.value, it.tolerance});
    rep.rows.push_back({k, "passed", it.passed ? 1.0 : 0.0, 0.0});
  }
  return rep;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SweepReport oracle_xcheck(const ExperimentConfig& c) {
  const auto f = sampled_nd(c);
  const FunctionPtr ev = f.require_closed_form("oracle_xcheck");
  const bool periodic = ev->traits().wavevector.has_value() || ev->traits().constant_value.has_value();
  std::vector<FracOrder> s;
  for (double v : c.orders) s.push_back(FracOrder::s(v, static_cast<int>(c.grid.dim)));
  const auto sg = frac_laplacian(f, s, LapMethod::semigroup, c.quad, c.grid.window);
  const auto pv = frac_laplacian(f, s, LapMethod::pv, c.quad, c.grid.window);
  std::vector<FracLapResult> sp;
  if (periodic) sp = frac_laplacian(f, s, LapMethod::spectral, c.quad, c.grid.window);
  SweepReport rep;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double o = c.orders[j];
    double est = 0.0;
    for (std::size_t k = 0; k < sg[j].error.size(); ++k) est = std::max({est, sg[j].error[k], pv[j].error[k]});
    rep.rows.push_back({o, "semigroup_vs_pv", sup_diff(sg[j].values, pv[j].values), est});
    if (periodic) {
      rep.rows.push_back({o, "semigroup_vs_spectral", sup_diff(sg[j].values, sp[j].values), 0.0});
      rep.rows.push_back({o, "pv_vs_spectral", sup_diff(pv[j].values, sp[j].values), 0.0});
    }
  }
  if (c.grid.dim == 1 && periodic) {
    const auto f1 = sample(parse_entry(c.function), axis(c.grid));
    for (double a : c.orders) {
      const auto al = FracOrder::alpha(a);
      const auto md = marchaud_left(f1, al, c.quad, c.grid.window);
      const auto spd = spectral_fracderiv(f1, al);
      double m = 0.0;
      for (std::size_t k = 0; k < md.t.size(); ++k)
        m = std::max(m, std::abs(md.values[k] - spd.values[f1.grid.nearest(md.t[k])]));
      rep.rows.push_back({a, "marchaud_vs_spectral", m, 0.0});
    }
  }
  return rep;
}

std::string strip_kind(const Error& e) {
  const std::string w = e.what();
  const std::string pre = std::string(to_string(e.kind())) + ": ";
  return w.compare(0, pre.size(), pre) == 0 ? w.substr(pre.size()) : w;
}

// ---- CSV ----

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> recs;
  std::vector<std::string> cur;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      if (!field.empty()) throw Error(ErrorKind::IoError, "stray quote in CSV field");
      quoted = any = true;
    } else if (ch == ',') {
      cur.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        cur.push_back(std::move(field));
        recs.push_back(std::move(cur));
      }
      cur.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorKind::IoError, "unterminated quote in CSV");
  if (any || !field.empty()) {
    cur.push_back(std::move(field));
    recs.push_back(std::move(cur));
  }
  return recs;
}

double csv_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::IoError, "bad number '" + s + "' in report");
  }
  if (used != s.size()) throw Error(ErrorKind::IoError, "bad number '" + s + "' in report");
  return v;
}

void check_finite(const SweepReport& r) {
  for (const auto& row : r.rows)
    if (!std::isfinite(row.order) || !std::isfinite(row.value) || !std::isfinite(row.error))
      throw Error(ErrorKind::IoError, "non-finite entry in row '" + row.metric + "'");
}

}  // namespace

const char* artifact_version() { return kVersion; }

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::deriv_limits: return "deriv_limits";
    case Experiment::lap_limits: return "lap_limits";
    case Experiment::maximal_ratios: return "maximal_ratios";
    case Experiment::weight_scan: return "weight_scan";
    case Experiment::ftfc: return "ftfc";
    case Experiment::semigroup_suite: return "semigroup_suite";
    case Experiment::oracle_xcheck: return "oracle_xcheck";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& s) {
  for (Experiment e : {Experiment::deriv_limits, Experiment::lap_limits, Experiment::maximal_ratios,
                       Experiment::weight_scan, Experiment::ftfc, Experiment::semigroup_suite,
                       Experiment::oracle_xcheck})
    if (s == to_string(e)) return e;
  bad("unknown experiment '" + s + "'");
}

void ExperimentConfig::validate() const {
  try {
    parse_entry(function);
    make_weight(weight, grid.dim >= 1 && grid.dim <= 3 ? grid.dim : 1);
  } catch (const Error& e) {
    bad(strip_kind(e));
  }
  if (!(p >= 1.0)) bad("p must be >= 1");
  if (uses_orders(experiment) && orders.empty()) bad("empty order list");
  for (double o : orders)
    if (!(o > 0.0 && o < 1.0)) bad("order " + format_double(o) + " outside (0,1)");
  if (grid.dim < 1 || grid.dim > 3) bad("grid.dim must be 1, 2 or 3");
  if (!(grid.hi > grid.lo)) bad("grid needs lo < hi");
  if (grid.points < 2) bad("grid needs at least 2 points");
  if (grid.window && !(grid.window->hi >= grid.window->lo)) bad("window needs lo <= hi");
  if (grid.lattice_jmin > grid.lattice_jmax) bad("lattice_jmin > lattice_jmax");
  if (!(grid.points_per_scale > 1.0)) bad("points_per_scale must exceed 1");
  try {
    parse_lap_method(method);
    parse_format(format);
    quad.validate();
  } catch (const Error& e) {
    bad(strip_kind(e));
  }
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    bad(std::string("malformed config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  ExperimentConfig c;
  std::set<std::string> seen;
  for (const auto& [sec, body] : tree) {
    if (body.empty() && !body.data().empty()) bad("key '" + sec + "' outside of a section");
    if (sec != "experiment" && sec != "grid" && sec != "quadrature" && sec != "output")
      bad("unknown section [" + sec + "]");
    for (const auto& [key, val] : body) {
      if (!val.empty()) bad("nested key in [" + sec + "]");
      set_key(c, sec, key, val.data());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& c) {
  std::string out, sec;
  for (const auto& [s, k, v] : config_entries(c)) {
    if (s != sec) {
      out += (sec.empty() ? "" : "\n") + std::string("[") + s + "]\n";
      sec = s;
    }
    out += k + " = " + v + "\n";
  }
  return out;
}

SweepReport run(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SweepReport rep;
  try {
    switch (config.experiment) {
      case Experiment::deriv_limits: rep = deriv_limits(config); break;
      case Experiment::lap_limits: rep = lap_limits(config); break;
      case Experiment::maximal_ratios: rep = maximal_ratios(config); break;
      case Experiment::weight_scan: rep = weight_scan_exp(config); break;
      case Experiment::ftfc: rep = ftfc(config); break;
      case Experiment::semigroup_suite: rep = suite(config); break;
      case Experiment::oracle_xcheck: rep = oracle_xcheck(config); break;
    }
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("experiment ") + to_string(config.experiment) + ": " + strip_kind(e));
  }
  rep.sort_rows();
  rep.metadata.clear();
  rep.metadata.emplace_back("artifact_version", kVersion);
  for (const auto& [s, k, v] : config_entries(config)) rep.metadata.emplace_back(s + "." + k, v);
  const GridConfig& g = config.grid;
  rep.metadata.emplace_back("grid", std::to_string(g.points) + (g.dim > 1 ? "^" + std::to_string(g.dim) : "") +
                                        " nodes on [" + format_double(g.lo) + "," + format_double(g.hi) + "]" +
                                        (g.dim > 1 ? "^" + std::to_string(g.dim) : ""));
  rep.metadata.emplace_back("rows", std::to_string(rep.rows.size()));
  if (config.record_runtime) {
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.metadata.emplace_back("runtime_seconds", format_double(sec));
  }
  return rep;
}

ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  bad("unknown report format '" + s + "'");
}

std::string emit(const SweepReport& report, ReportFormat format) {
  check_finite(report);
  if (format == ReportFormat::csv) {
    std::string out = "order,metric,value,error\n";
    for (const auto& r : report.rows)
      out += format_double(r.order) + "," + csv_field(r.metric) + "," + format_double(r.value) + "," +
             format_double(r.error) + "\n";
    return out;
  }
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metadata) j["metadata"][k] = v;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows)
    j["rows"].push_back({{"order", r.order}, {"metric", r.metric}, {"value", r.value}, {"error", r.error}});
  return j.dump(2) + "\n";
}

SweepReport parse_report(const std::string& text, ReportFormat format) {
  SweepReport rep;
  if (format == ReportFormat::csv) {
    const auto recs = csv_records(text);
    if (recs.empty() || recs[0] != std::vector<std::string>{"order", "metric", "value", "error"})
      throw Error(ErrorKind::IoError, "CSV report header missing");
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const auto& r = recs[i];
      if (r.size() != 4) throw Error(ErrorKind::IoError, "CSV line " + std::to_string(i + 1) + " needs 4 fields");
      rep.rows.push_back({csv_number(r[0]), r[1], csv_number(r[2]), csv_number(r[3])});
    }
    return rep;
  }
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    for (const auto& [k, v] : j.at("metadata").items()) rep.metadata.emplace_back(k, v.get<std::string>());
    for (const auto& r : j.at("rows"))
      rep.rows.push_back({r.at("order").get<double>(), r.at("metric").get<std::string>(), r.at("value").get<double>(),
                          r.at("error").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoError, std::string("malformed JSON report: ") + e.what());
  }
  return rep;
}

void write_report(const SweepReport& report, ReportFormat format, const std::string& path) {
  const std::string body = emit(report, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

}  // namespace fraclab
