#include "fraclab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fraclab/error.hpp"
#include "fraclab/maximal.hpp"
#include "maximal_detail.hpp"
#include "ray.hpp"

namespace fraclab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFloor = 1e-300;
constexpr std::size_t kLevels = 60;

struct Powered {
  const Weight& w;
  double q;
  std::size_t* floored;

  double at(std::span<const double> x) const {
    double v = w(x);
    if (std::isnan(v) || v < 0.0) throw Error(ErrorKind::NonPositiveWeight, "weight '" + w.name() + "' is negative");
    if (v < kFloor) {
      v = kFloor;
      if (floored) ++*floored;
    }
    return std::pow(v, q);
  }
  double operator()(double t) const { return at(std::span<const double>(&t, 1)); }
};

// integral of g over (0, L] where g(u) may blow up as u -> 0: dyadic panels,
// then the geometric remainder implied by the last two levels.
double graded_toward_zero(const detail::Fn& g, double L, double width) {
  double total = 0.0, last = 0.0, before = 0.0;
  double hi = L;
  for (std::size_t k = 0; k < kLevels; ++k) {
    const double lo = 0.5 * hi;
    const double c = detail::panels(g, lo, hi, 16, std::min(hi, width), {}).value;
    if (!std::isfinite(c)) return kInf;
    total += c;
    before = last;
    last = c;
    hi = lo;
  }
  if (last != 0.0 && before != 0.0) {
    const double rho = last / before;
    if (rho >= 0.999) return kInf;
    if (rho > 0.0) total += last * rho / (1.0 - rho);
  }
  return total;
}

// integral of g over [l, r], graded toward the flagged ends.
double segment(const detail::Fn& g, double l, double r, bool grade_l, bool grade_r, double width) {
  if (!(r > l)) return 0.0;
  if (grade_l && grade_r) {
    const double m = 0.5 * (l + r);
    return segment(g, l, m, true, false, width) + segment(g, m, r, false, true, width);
  }
  if (grade_l) return graded_toward_zero([&](double u) { return g(l + u); }, r - l, width);
  if (grade_r) return graded_toward_zero([&](double u) { return g(r - u); }, r - l, width);
  return detail::panels(g, l, r, 16, width, {}).value;
}

double smooth_width(const Weight& w, double q) {
  const double l = w.length_scale();
  if (!std::isfinite(l)) return kInf;
  return q == 0.0 ? kInf : 4.0 * l / std::abs(q);
}

double radial_ball_integral(const Weight& w, double q, std::span<const double> c, double r, std::size_t* floored) {
  const std::size_t n = c.size();
  double d2 = 0.0;
  for (double v : c) d2 += v * v;
  const double d = std::sqrt(d2);
  const Powered pw{w, q, floored};
  std::vector<double> x(n, 0.0);
  auto wq = [&](double rho) {
    x[0] = rho;
    return pw.at(x);
  };
  const double area = detail::sphere_area(n);
  const double width = smooth_width(w, q);
  auto cap = [&](double rho) {
    // part of the sphere |x| = rho inside B(c, r)
    if (rho <= r - d) return area * std::pow(rho, double(n - 1));
    const double cth = std::clamp((rho * rho + d2 - r * r) / (2.0 * rho * d), -1.0, 1.0);
    if (n == 2) return 2.0 * rho * std::acos(cth);
    return 2.0 * std::numbers::pi * rho * rho * (1.0 - cth);
  };
  const detail::Fn g = [&](double rho) { return wq(rho) * cap(rho); };
  const bool singular = w.radial_singularity();
  double total = 0.0;
  if (d < r) {
    total += segment(g, 0.0, r - d, singular, false, width);
    if (d > 0.0) total += segment(g, r - d, r + d, true, true, width);
  } else {
    total += segment(g, d - r, d + r, true, true, width);
  }
  return total;
}

double product(double avg_w, double avg_dual, double p) {
  const double pp = p / (p - 1.0);
  return std::pow(avg_w, 1.0 / p) * std::pow(avg_dual, 1.0 / pp);
}

WeightConstant reduce(const WeightScan& scan, double cap, std::size_t dim) {
  WeightConstant c;
  c.floored = scan.floored;
  for (const auto& row : scan.rows) {
    if (!(row.product <= cap)) {
      std::ostringstream os;
      os << "cap exceeded at scale h=" << row.h << " (product " << row.product << " > " << cap
         << "): not in class at this cap";
      throw Error(ErrorKind::IntegralOverflow, os.str());
    }
    if (row.product > c.value) {
      c.value = row.product;
      c.argmax_center = row.center;
      c.argmax_h = row.h;
    }
  }
  (void)dim;
  return c;
}

// 1D weight as a Function so the maximal operators apply to it.
class WeightFunction final : public Function {
 public:
  explicit WeightFunction(const Weight& w) : w_(w) {
    t_.decay = DecayClass::bounded;
    t_.length_scale = std::isfinite(w.length_scale()) ? w.length_scale() : 1.0;
    t_.axis_scales = {t_.length_scale};
    t_.support_lo = {-kInf};
    t_.support_hi = {kInf};
    t_.breakpoints = w.singular_points();
    t_.sup_abs = kInf;
    t_.smooth = w.singular_points().empty();
    if (w.family() == WeightFamily::constant) t_.constant_value = w(0.0);
  }
  std::size_t dim() const override { return 1; }
  double value(std::span<const double> x) const override { return w_(x); }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    const double h = 1e-6 * t_.length_scale;
    g[0] = (w_(x[0] + h) - w_(x[0] - h)) / (2.0 * h);
  }
  void hessian(std::span<const double> x, std::span<double> hs) const override {
    const double h = 1e-4 * t_.length_scale;
    hs[0] = (w_(x[0] + h) - 2.0 * w_(x[0]) + w_(x[0] - h)) / (h * h);
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override { return w_.name(); }

 private:
  const Weight& w_;
  FunctionTraits t_;
};

}  // namespace

LatticeSpec LatticeSpec::on_grid(const Grid1D& grid, int jmin, int jmax) {
  LatticeSpec l;
  l.dim = 1;
  l.centers = grid.points();
  for (int j = jmin; j <= jmax; ++j) l.scales.push_back(std::ldexp(1.0, j));
  l.validate();
  return l;
}

LatticeSpec LatticeSpec::on_grid(const GridND& grid, int jmin, int jmax) {
  LatticeSpec l;
  l.dim = grid.dim();
  l.centers.resize(grid.size() * grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid.point(i, std::span<double>(l.centers.data() + i * l.dim, l.dim));
  for (int j = jmin; j <= jmax; ++j) l.scales.push_back(std::ldexp(1.0, j));
  l.validate();
  return l;
}

void LatticeSpec::validate() const {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::ParameterOutOfRange, "lattice dimension must be 1..3");
  if (centers.empty() || centers.size() % dim != 0)
    throw Error(ErrorKind::ParameterOutOfRange, "lattice needs at least one center");
  if (scales.empty()) throw Error(ErrorKind::ParameterOutOfRange, "lattice needs at least one scale");
  for (std::size_t i = 0; i < scales.size(); ++i)
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i]) || (i > 0 && !(scales[i] > scales[i - 1])))
      throw Error(ErrorKind::ParameterOutOfRange, "lattice scales must be positive and ascending");
}

double weight_integral(const Weight& w, double q, double a, double b, std::size_t* floored) {
  if (!(b > a)) return 0.0;
  const Powered pw{w, q, floored};
  const detail::Fn g = [&](double t) { return pw(t); };
  std::vector<double> cuts{a};
  for (double s : w.singular_points())
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const auto& sing = w.singular_points();
  auto is_sing = [&](double x) { return std::find(sing.begin(), sing.end(), x) != sing.end(); };
  const double width = smooth_width(w, q);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += segment(g, cuts[i], cuts[i + 1], is_sing(cuts[i]), is_sing(cuts[i + 1]), width);
    if (!std::isfinite(total)) return kInf;
  }
  return total;
}

WeightScan weight_scan(const Weight& w, double p, WeightSide side, const LatticeSpec& lat,
                       const QuadratureSpec& quad) {
  lat.validate();
  quad.validate();
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::ParameterOutOfRange, "p must be > 1");
  if (w.dim() != lat.dim) throw Error(ErrorKind::GridMismatch, "weight and lattice dimensions differ");
  if (lat.dim > 1 && side != WeightSide::two_sided)
    throw Error(ErrorKind::ParameterOutOfRange, "one-sided conditions are 1D");
  if (lat.dim > 1 && !(w.radial_singularity() || w.family() == WeightFamily::constant))
    throw Error(ErrorKind::ParameterOutOfRange, "nD balls need a constant or radial weight");
  const double q = 1.0 - p / (p - 1.0);  // 1 - p'
  const std::size_t nc = lat.n_centers(), ns = lat.scales.size();
  WeightScan scan;
  scan.rows.resize(nc * ns);
  std::vector<std::size_t> floors(nc * ns, 0);
  for_each_index(quad.exec, nc * ns, [&](std::size_t k) {
    const std::size_t ci = k / ns, si = k % ns;
    std::span<const double> c(lat.centers.data() + ci * lat.dim, lat.dim);
    const double h = lat.scales[si];
    std::size_t* fl = &floors[k];
    double avg_w = 0.0, avg_d = 0.0;
    if (lat.dim == 1) {
      const double a = c[0];
      switch (side) {
        case WeightSide::minus:
          avg_w = weight_integral(w, 1.0, a, a + h, fl) / h;
          avg_d = weight_integral(w, q, a - h, a, fl) / h;
          break;
        case WeightSide::plus:
          avg_w = weight_integral(w, 1.0, a - h, a, fl) / h;
          avg_d = weight_integral(w, q, a, a + h, fl) / h;
          break;
        case WeightSide::two_sided:
          avg_w = weight_integral(w, 1.0, a - h, a + h, fl) / (2.0 * h);
          avg_d = weight_integral(w, q, a - h, a + h, fl) / (2.0 * h);
          break;
      }
    } else {
      const double vol = detail::ball_volume(lat.dim, h);
      avg_w = radial_ball_integral(w, 1.0, c, h, fl) / vol;
      avg_d = radial_ball_integral(w, q, c, h, fl) / vol;
    }
    double prod = product(avg_w, avg_d, p);
    if (std::isnan(prod)) prod = kInf;
    scan.rows[k] = ScanRow{std::vector<double>(c.begin(), c.end()), h, prod};
  });
  for (std::size_t f : floors) scan.floored += f;
  return scan;
}

WeightConstant sawyer_minus_constant(const Weight& w, double p, const LatticeSpec& lat, const QuadratureSpec& quad,
                                     double cap) {
  if (lat.dim != 1) throw Error(ErrorKind::ParameterOutOfRange, "Sawyer conditions are 1D");
  return reduce(weight_scan(w, p, WeightSide::minus, lat, quad), cap, 1);
}

WeightConstant sawyer_plus_constant(const Weight& w, double p, const LatticeSpec& lat, const QuadratureSpec& quad,
                                    double cap) {
  if (lat.dim != 1) throw Error(ErrorKind::ParameterOutOfRange, "Sawyer conditions are 1D");
  return reduce(weight_scan(w, p, WeightSide::plus, lat, quad), cap, 1);
}

WeightConstant muckenhoupt_constant(const Weight& w, double p, const LatticeSpec& balls, const QuadratureSpec& quad,
                                    double cap) {
  return reduce(weight_scan(w, p, WeightSide::two_sided, balls, quad), cap, balls.dim);
}

A1Report a1_minus_ratio(const Weight& w, const Grid1D& grid, int jmin, int jmax, double cap, Exec exec) {
  if (w.dim() != 1) throw Error(ErrorKind::ParameterOutOfRange, "A1 ratio is 1D");
  if (grid.size() < 3) throw Error(ErrorKind::WindowTooNarrow, "need interior grid points");
  const WeightFunction f(w);
  const auto lat = ScaleLattice::dyadic(jmin, jmax);
  const std::size_t n = grid.size() - 2;
  std::vector<double> ratio(n), at(n);
  for_each_index(exec, n, [&](std::size_t k) {
    const double t = grid[k + 1];
    const double m = m_plus_at(f, t, lat, &at[k]);
    ratio[k] = m / std::max(w(t), kFloor);
    if (std::isnan(ratio[k])) ratio[k] = kInf;
  });
  A1Report r;
  for (std::size_t k = 0; k < n; ++k)
    if (ratio[k] > r.ratio) {
      r.ratio = ratio[k];
      r.argmax_t = grid[k + 1];
      r.argmax_h = at[k];
    }
  r.cap_exceeded = !(r.ratio <= cap);
  return r;
}

}  // namespace fraclab
