#include "fraclab/funcspace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"
#include "ray.hpp"

namespace fraclab {

void QuadratureSpec::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::ParameterOutOfRange, m); };
  if (!(split_point > 0.0)) bad("split_point must be > 0");
  if (n_singular < 16 || n_tail < 16) bad("node counts must be >= 16");
  if (tail_radius && !(*tail_radius > split_point)) bad("tail_radius must exceed split_point");
  for (std::size_t i = 0; i < pv_epsilon_schedule.size(); ++i) {
    if (!(pv_epsilon_schedule[i] > 0.0)) bad("epsilon schedule must be positive");
    if (i > 0 && !(pv_epsilon_schedule[i] < pv_epsilon_schedule[i - 1]))
      bad("epsilon schedule must be strictly decreasing");
  }
  if (graded_levels == 0 || pv_levels == 0 || time_levels == 0) bad("graded level counts must be >= 1");
  if (angular_nodes < 4) bad("angular_nodes must be >= 4");
  if (!(tolerance > 0.0)) bad("tolerance must be > 0");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Interpolant final : public Function {
 public:
  Interpolant(const Grid1D& grid, std::vector<double> v, DecayClass decay)
      : grid_(grid), v_(std::move(v)), d_(v_.size()), decay_(decay) {
    const std::size_t n = v_.size();
    const double h = grid_.spacing();
    if (n >= 5) {
      for (std::size_t i = 2; i + 2 < n; ++i)
        d_[i] = (v_[i - 2] - 8.0 * v_[i - 1] + 8.0 * v_[i + 1] - v_[i + 2]) / (12.0 * h);
      d_[0] = (-25.0 * v_[0] + 48.0 * v_[1] - 36.0 * v_[2] + 16.0 * v_[3] - 3.0 * v_[4]) / (12.0 * h);
      d_[1] = (-3.0 * v_[0] - 10.0 * v_[1] + 18.0 * v_[2] - 6.0 * v_[3] + v_[4]) / (12.0 * h);
      d_[n - 1] = -(-25.0 * v_[n - 1] + 48.0 * v_[n - 2] - 36.0 * v_[n - 3] + 16.0 * v_[n - 4] - 3.0 * v_[n - 5]) /
                  (12.0 * h);
      d_[n - 2] = -(-3.0 * v_[n - 1] - 10.0 * v_[n - 2] + 18.0 * v_[n - 3] - 6.0 * v_[n - 4] + v_[n - 5]) /
                  (12.0 * h);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
        d_[i] = (v_[b] - v_[a]) / (h * static_cast<double>(b - a));
      }
    }
    t_.decay = decay;
    t_.length_scale = h;
    t_.axis_scales = {h};
    const bool zero_left = decay != DecayClass::bounded;
    const bool zero_right = decay == DecayClass::compact_support || decay == DecayClass::gaussian;
    t_.support_lo = {zero_left ? grid_.t_min() : -kInf};
    t_.support_hi = {zero_right ? grid_.t_max() : kInf};
    t_.breakpoints = grid_.points();
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    t_.sup_abs = m;
    t_.smooth = false;
    if (zero_left && zero_right) t_.heat_limit = 0.0;
  }

  std::size_t dim() const override { return 1; }
  double value(std::span<const double> x) const override { return eval(x[0], 0); }
  void gradient(std::span<const double> x, std::span<double> g) const override { g[0] = eval(x[0], 1); }
  void hessian(std::span<const double> x, std::span<double> h) const override {
    const double t = x[0];
    const double u = (t - grid_.t_min()) / grid_.spacing();
    const double r = std::round(u);
    if (std::abs(u - r) < 1e-9 && r > 0.0 && r < static_cast<double>(v_.size() - 1)) {
      // average of the one-sided second derivatives at a node
      const auto i = static_cast<std::size_t>(r);
      h[0] = 0.5 * (cell_eval(i - 1, 1.0, 2) + cell_eval(i, 0.0, 2));
      return;
    }
    h[0] = eval(t, 2);
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override { return "interpolant"; }

 private:
  double eval(double t, int order) const {
    const std::size_t n = v_.size();
    if (t < grid_.t_min() || t > grid_.t_max()) {
      const bool left = t < grid_.t_min();
      const bool zero = left ? decay_ != DecayClass::bounded
                             : (decay_ == DecayClass::compact_support || decay_ == DecayClass::gaussian);
      if (zero || order > 0) return 0.0;
      return left ? v_.front() : v_.back();
    }
    const double u = (t - grid_.t_min()) / grid_.spacing();
    std::size_t i = static_cast<std::size_t>(std::floor(u));
    if (i >= n - 1) i = n - 2;
    return cell_eval(i, u - static_cast<double>(i), order);
  }

  double cell_eval(std::size_t i, double s, int order) const {
    const double h = grid_.spacing();
    const double a = v_[i], b = v_[i + 1], da = h * d_[i], db = h * d_[i + 1];
    switch (order) {
      case 0: {
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * a + (s3 - 2 * s2 + s) * da + (-2 * s3 + 3 * s2) * b + (s3 - s2) * db;
      }
      case 1: {
        const double s2 = s * s;
        return ((6 * s2 - 6 * s) * a + (3 * s2 - 4 * s + 1) * da + (-6 * s2 + 6 * s) * b + (3 * s2 - 2 * s) * db) /
               h;
      }
      default:
        return ((12 * s - 6) * a + (6 * s - 4) * da + (-12 * s + 6) * b + (6 * s - 2) * db) / (h * h);
    }
  }

  Grid1D grid_;
  std::vector<double> v_;
  std::vector<double> d_;
  DecayClass decay_;
  FunctionTraits t_;
};

double psi_raw(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double v = 2.0 * u - 1.0;
  return std::exp(-1.0 / (1.0 - v * v));
}

double psi_mass() {
  static const double z = detail::panels(psi_raw, 0.0, 1.0, 16, 1.0 / 32.0, {}).value;
  return z;
}

class Mollified final : public Function {
 public:
  Mollified(FunctionPtr f, double eps) : f_(std::move(f)), eps_(eps) {
    t_ = f_->traits();
    for (double& v : t_.support_hi) v += eps;
    t_.breakpoints.clear();
    t_.wavevector.reset();
  }
  std::size_t dim() const override { return 1; }
  double value(std::span<const double> x) const override { return conv(x[0], 0); }
  void gradient(std::span<const double> x, std::span<double> g) const override { g[0] = conv(x[0], 1); }
  void hessian(std::span<const double> x, std::span<double> h) const override { h[0] = conv(x[0], 2); }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override {
    std::ostringstream os;
    os << "mollify(" << f_->name() << "," << eps_ << ")";
    return os.str();
  }

 private:
  double conv(double t, int order) const {
    std::vector<double> breaks;
    for (double b : f_->traits().breakpoints) {
      const double u = (t - b) / eps_;
      if (u > 0.0 && u < 1.0) breaks.push_back(u);
    }
    std::sort(breaks.begin(), breaks.end());
    auto g = [&](double u) {
      const double y = t - eps_ * u;
      const double fy = order == 0 ? (*f_)(y) : order == 1 ? f_->d1(y) : f_->d2(y);
      return fy * psi_raw(u);
    };
    return detail::panels(g, 0.0, 1.0, 16, 1.0 / 32.0, breaks).value / psi_mass();
  }

  FunctionPtr f_;
  double eps_;
  FunctionTraits t_;
};

void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorKind::ParameterOutOfRange, "sampled values must be finite");
}

// Trapezoid weights and index range of a window on one axis.
struct AxisWindow {
  std::size_t lo, hi;
};

AxisWindow snap(const Grid1D& g, Window w) {
  if (!(w.lo <= w.hi)) throw Error(ErrorKind::ParameterOutOfRange, "window needs lo <= hi");
  const double a = std::floor((w.lo - g.t_min()) / g.spacing() + 1e-9);
  const double b = std::ceil((w.hi - g.t_min()) / g.spacing() - 1e-9);
  const double last = static_cast<double>(g.size() - 1);
  const auto lo = static_cast<std::size_t>(std::clamp(a, 0.0, last));
  const auto hi = static_cast<std::size_t>(std::clamp(b, 0.0, last));
  if (hi <= lo) throw Error(ErrorKind::WindowTooNarrow, "window holds fewer than two grid nodes");
  return {lo, hi};
}

// Points on the unit sphere (half of the directions suffice for symmetric sums,
// but norms need the full sphere). Weights sum to |S^{n-1}|.
void full_sphere(std::size_t n, std::size_t m, std::vector<std::vector<double>>& dirs, std::vector<double>& w) {
  dirs.clear();
  w.clear();
  if (n == 1) {
    dirs = {{1.0}, {-1.0}};
    w = {1.0, 1.0};
  } else if (n == 2) {
    for (std::size_t k = 0; k < m; ++k) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
      dirs.push_back({std::cos(th), std::sin(th)});
      w.push_back(2.0 * std::numbers::pi / static_cast<double>(m));
    }
  } else {
    const Rule& gl = gauss_legendre(std::max<std::size_t>(m / 2, 8));
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double u = gl.nodes[i], sr = std::sqrt(1.0 - u * u);
      for (std::size_t k = 0; k < m; ++k) {
        const double ph = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        dirs.push_back({sr * std::cos(ph), sr * std::sin(ph), u});
        w.push_back(gl.weights[i] * 2.0 * std::numbers::pi / static_cast<double>(m));
      }
    }
  }
}

}  // namespace

FunctionPtr SampledFunction1D::evaluator() const {
  if (closed_form) return closed_form;
  return make_interpolant(grid, values, decay);
}

FunctionPtr SampledFunctionND::require_closed_form(const char* op) const {
  if (!closed_form)
    throw Error(ErrorKind::ParameterOutOfRange, std::string(op) + " needs a closed-form function");
  return closed_form;
}

SampledFunction1D sample(FunctionPtr f, const Grid1D& grid) {
  if (f->dim() != 1) throw Error(ErrorKind::GridMismatch, "1D grid for a " + std::to_string(f->dim()) + "D function");
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = (*f)(grid[i]);
  return {grid, std::move(v), f, f->traits().decay};
}

SampledFunction1D sample(const CatalogEntry& entry, const Grid1D& grid) {
  return sample(make_function(entry, 1), grid);
}

SampledFunctionND sample(FunctionPtr f, const GridND& grid) {
  if (f->dim() != grid.dim()) throw Error(ErrorKind::GridMismatch, "grid and function dimensions differ");
  std::vector<double> v(grid.size());
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    v[i] = f->value(x);
  }
  return {grid, std::move(v), f, f->traits().decay};
}

SampledFunctionND sample(const CatalogEntry& entry, const GridND& grid) {
  return sample(make_function(entry, grid.dim()), grid);
}

SampledFunction1D from_samples(const Grid1D& grid, std::vector<double> values, DecayClass decay) {
  if (values.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "value count differs from grid size");
  check_finite(values);
  return {grid, std::move(values), nullptr, decay};
}

FunctionPtr make_interpolant(const Grid1D& grid, std::vector<double> values, DecayClass decay) {
  if (values.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "value count differs from grid size");
  check_finite(values);
  return std::make_shared<Interpolant>(grid, std::move(values), decay);
}

SampledWeight sample_weight(const Weight& w, const Grid1D& grid) { return sample_weight(w, GridND({grid})); }

SampledWeight sample_weight(const Weight& w, const GridND& grid) {
  if (w.dim() != grid.dim()) throw Error(ErrorKind::GridMismatch, "grid and weight dimensions differ");
  std::vector<double> v(grid.size());
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    v[i] = w(x);
  }
  return {grid, std::move(v)};
}

double weighted_lp_norm(const GridND& grid, std::span<const double> f, std::span<const double> w, double p,
                        Window window) {
  if (!(p >= 1.0)) throw Error(ErrorKind::ParameterOutOfRange, "p must be >= 1");
  if (f.size() != grid.size() || w.size() != grid.size())
    throw Error(ErrorKind::GridMismatch, "function, weight and grid sizes differ");
  for (double v : w)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::NonPositiveWeight, "weight sample is negative or not finite");
  const std::size_t n = grid.dim();
  std::vector<AxisWindow> ax(n);
  for (std::size_t k = 0; k < n; ++k) ax[k] = snap(grid.axis(k), window);
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = ax[k].lo;
  double sum = 0.0;
  while (true) {
    double tw = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double h = grid.axis(k).spacing();
      tw *= (idx[k] == ax[k].lo || idx[k] == ax[k].hi) ? 0.5 * h : h;
    }
    const std::size_t flat = grid.flatten(idx);
    const double a = std::abs(f[flat]);
    if (a > 0.0) sum += std::pow(a, p) * w[flat] * tw;
    std::size_t k = n;
    while (k-- > 0) {
      if (++idx[k] <= ax[k].hi) break;
      idx[k] = ax[k].lo;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return std::pow(sum, 1.0 / p);
}

double weighted_lp_norm(const SampledFunction1D& f, const SampledWeight& w, double p, Window window) {
  if (w.grid.dim() != 1 || !(w.grid.axis(0) == f.grid))
    throw Error(ErrorKind::GridMismatch, "function and weight grids differ");
  return weighted_lp_norm(w.grid, f.values, w.values, p, window);
}

double weighted_lp_norm(const SampledFunctionND& f, const SampledWeight& w, double p, Window window) {
  if (!(w.grid == f.grid)) throw Error(ErrorKind::GridMismatch, "function and weight grids differ");
  return weighted_lp_norm(f.grid, f.values, w.values, p, window);
}

TailNorm tail_norm_A(const SampledFunction1D& fs, const FracOrder& alpha, double A, const QuadratureSpec& quad) {
  quad.validate();
  const FunctionPtr f = fs.evaluator();
  const FunctionTraits& tr = f->traits();
  const double a = alpha.value();
  if (tr.constant_value && *tr.constant_value == 0.0) return {0.0, 0.0};
  const bool left_decay = tr.decay == DecayClass::compact_support || tr.decay == DecayClass::gaussian ||
                          tr.decay == DecayClass::exponential_left;
  if (!left_decay && !std::isfinite(tr.sup_abs))
    throw Error(ErrorKind::DivergentTail, "function is unbounded toward -infinity");

  auto weight = [a](double tau) { return 1.0 / (1.0 + std::pow(std::abs(tau), 1.0 + a)); };
  auto g = [&](double tau) { return std::abs((*f)(tau)) * weight(tau); };
  const double scale = std::min(1.0, std::isfinite(tr.length_scale) ? tr.length_scale : 1.0);
  // |tau|^{1+alpha} is not smooth at 0: grade the panels toward it
  std::vector<double> breaks = tr.breakpoints;
  breaks.push_back(0.0);
  for (int k = 0; k <= 40; ++k) {
    breaks.push_back(std::ldexp(1.0, -k));
    breaks.push_back(-std::ldexp(1.0, -k));
  }
  std::sort(breaks.begin(), breaks.end());
  const detail::Fn kink = [&](double tau) { return (*f)(tau); };

  double lo = -kInf;
  double bound = 0.0;
  if (tr.decay == DecayClass::compact_support || tr.decay == DecayClass::gaussian) {
    lo = tr.support_lo.empty() ? -kInf : tr.support_lo[0];
  } else if (tr.decay == DecayClass::exponential_left) {
    lo = A - 45.0 / tr.left_decay_rate;
    bound = std::abs((*f)(A)) * std::exp(-45.0) / tr.left_decay_rate;
  }
  if (std::isfinite(lo)) {
    if (lo >= A) return {0.0, 0.0};
    const auto e = detail::panels(g, lo, A, quad.n_tail, scale, breaks, &kink);
    return {e.value, bound + e.error};
  }
  // bounded: uniform panels on [-R0, A], then for r > R0 expand
  // 1/(1 + r^b) = r^-b - r^-2b + r^-3b - ... and integrate each term along the ray
  const double b = 1.0 + a;
  const double R0 = std::max(1e3, 2.0 * std::abs(A));
  detail::Estimate e = detail::panels(g, -R0, A, quad.n_tail, scale, breaks, &kink);
  detail::RayInfo info;
  info.scale = scale;
  info.bound = tr.sup_abs;
  info.truncation = 1e6;
  if (tr.constant_value) info.constant = std::abs(*tr.constant_value);
  if (tr.wavevector && !tr.wavevector->empty() && (*tr.wavevector)[0] != 0.0)
    info.period = 2.0 * std::numbers::pi / std::abs((*tr.wavevector)[0]);
  auto ray = [&](double r) { return std::abs((*f)(-r)); };
  const detail::Fn ray_kink = [&](double r) { return (*f)(-r); };
  info.kink = &ray_kink;
  double sign = 1.0;
  for (int m = 1; m <= 6; ++m, sign = -sign) {
    const auto t = detail::ray_tail(ray, R0, m * b, info, quad.n_tail);
    e.value += sign * t.value;
    e.error += t.error;
  }
  e.error += tr.sup_abs * std::pow(R0, 1.0 - 7.0 * b) / (7.0 * b - 1.0);
  return {e.value, e.error};
}

TailNorm ls_tail_norm(const SampledFunctionND& fs, const FracOrder& s, const QuadratureSpec& quad) {
  quad.validate();
  const FunctionPtr f = fs.require_closed_form("ls_tail_norm");
  const FunctionTraits& tr = f->traits();
  const std::size_t n = f->dim();
  const double sv = s.value();
  if (tr.constant_value && *tr.constant_value == 0.0) return {0.0, 0.0};
  if (!std::isfinite(tr.sup_abs)) throw Error(ErrorKind::DivergentTail, "function is unbounded");

  double reach = 0.0;
  bool finite_box = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = std::max(std::abs(tr.support_lo[k]), std::abs(tr.support_hi[k]));
    if (!std::isfinite(m)) finite_box = false;
    reach += m * m;
  }
  reach = std::sqrt(reach);
  const double scale = std::min(1.0, tr.length_scale);

  std::vector<std::vector<double>> dirs;
  std::vector<double> dw;
  auto radial = [&](double r) {
    const std::size_t m = n == 1 ? 2
                                 : std::max<std::size_t>(quad.angular_nodes,
                                                         static_cast<std::size_t>(std::ceil(8.0 * r / scale)));
    full_sphere(n, std::min<std::size_t>(m, 4096), dirs, dw);
    std::vector<double> x(n);
    double acc = 0.0;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      for (std::size_t k = 0; k < n; ++k) x[k] = r * dirs[d][k];
      acc += dw[d] * std::abs(f->value(x));
    }
    return acc * std::pow(r, double(n) - 1.0) / (1.0 + std::pow(r, double(n) + 2.0 * sv));
  };

  const double area = n == 1 ? 2.0 : n == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  if (tr.constant_value) {
    // |c| |S^{n-1}| integral_0^inf r^{n-1} / (1 + r^{n+2s}) dr; beyond r = 1 substitute
    // u = 1/r, giving integral_0^1 u^{2s-1} / (1 + u^{n+2s}) du
    const double c = std::abs(*tr.constant_value);
    const double b = double(n) + 2.0 * sv;
    auto inner = [&](double r) { return std::pow(r, double(n) - 1.0) / (1.0 + std::pow(r, b)); };
    auto outer = [&](double u) { return std::pow(u, 2.0 * sv - 1.0) / (1.0 + std::pow(u, b)); };
    const std::size_t levels = 80;
    detail::Estimate e = detail::graded(inner, 1.0, levels, quad.n_tail, {});
    e += detail::graded(outer, 1.0, levels, quad.n_tail, {});
    const double delta = std::ldexp(1.0, -static_cast<int>(levels));
    e.value += std::pow(delta, double(n)) / double(n) + std::pow(delta, 2.0 * sv) / (2.0 * sv);
    return {c * area * e.value, c * area * e.error};
  }
  double R = reach;
  double bound = 0.0;
  if (!finite_box) {
    R = 200.0 * std::max(1.0, tr.length_scale);
    bound = tr.sup_abs * area * std::pow(R, -2.0 * sv) / (2.0 * sv);
  }
  detail::Estimate e = detail::panels(radial, 0.0, std::min(1.0, R), quad.n_tail, scale, {});
  double r = 1.0;
  while (r < R) {
    const double r2 = std::min(R, r + std::min(r, finite_box ? 1.0 : scale));
    e += detail::panels(radial, r, r2, quad.n_tail, scale, {});
    r = r2;
  }
  return {e.value, e.error + bound};
}

double mollifier_kernel(double u) { return psi_raw(u) / psi_mass(); }

SampledFunction1D mollify_one_sided(const SampledFunction1D& f, double eps) {
  if (!(eps >= f.grid.spacing()))
    throw Error(ErrorKind::EpsilonTooSmall, "mollifier width below the grid spacing");
  auto m = std::make_shared<Mollified>(f.evaluator(), eps);
  std::vector<double> v(f.grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (*m)(f.grid[i]);
  return {f.grid, std::move(v), m, f.decay};
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string to_csv(const SampledFunction1D& f) {
  std::string out = "t,value\n";
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    out += format_double(f.grid[i]) + "," + format_double(f.values[i]) + "\n";
  return out;
}

std::string to_csv(const SampledFunctionND& f) {
  static const char* kHeaders[] = {"t,value\n", "t,x2,value\n", "t,x2,x3,value\n"};
  std::string out = kHeaders[f.dim() - 1];
  std::vector<double> x(f.dim());
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    f.grid.point(i, x);
    for (double c : x) out += format_double(c) + ",";
    out += format_double(f.values[i]) + "\n";
  }
  return out;
}

}  // namespace fraclab
