#include "fraclab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraclab/error.hpp"
#include "fraclab/fracderiv.hpp"
#include "fraclab/quadrature.hpp"
#include "maximal_detail.hpp"
#include "ray.hpp"

namespace fraclab {

using detail::Estimate;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegligible = 45.0;  // e^{-45} ~ 3e-20

double panel_width(const FunctionTraits& tr) {
  return 0.5 * (std::isfinite(tr.length_scale) && tr.length_scale > 0.0 ? tr.length_scale : 1.0);
}

double min_axis_scale(const FunctionTraits& tr) {
  double l = tr.length_scale;
  for (double a : tr.axis_scales) l = std::min(l, a);
  return std::isfinite(l) && l > 0.0 ? l : 1.0;
}

}  // namespace

namespace detail {

std::vector<double> cumulative_abs(const Function& f, double t, int dir, std::span<const double> hs) {
  const FunctionTraits& tr = f.traits();
  std::vector<double> out(hs.size());
  if (tr.constant_value) {
    for (std::size_t k = 0; k < hs.size(); ++k) out[k] = std::abs(*tr.constant_value) * hs[k];
    return out;
  }
  double ulo = 0.0, uhi = kInf;
  if (!tr.support_lo.empty() && std::isfinite(tr.support_lo[0]) && std::isfinite(tr.support_hi[0])) {
    const double a = (tr.support_lo[0] - t) * dir, b = (tr.support_hi[0] - t) * dir;
    ulo = std::max(0.0, std::min(a, b));
    uhi = std::max(a, b);
  } else if (dir < 0 && tr.decay == DecayClass::exponential_left && tr.left_decay_rate > 0.0) {
    uhi = kNegligible / tr.left_decay_rate;
  }
  std::vector<double> breaks;
  for (double b : tr.breakpoints) {
    const double u = (b - t) * dir;
    if (u > 0.0) breaks.push_back(u);
  }
  std::sort(breaks.begin(), breaks.end());
  const Fn g = [&](double u) { return std::abs(f(t + dir * u)); };
  const Fn kink = [&](double u) { return f(t + dir * u); };
  const double w = panel_width(tr);
  auto piece = [&](double a, double b) { return detail::panels(g, a, b, 16, w, breaks, &kink).value; };

  std::optional<double> period, per_period;
  if (tr.wavevector && tr.wavevector->size() == 1 && (*tr.wavevector)[0] != 0.0 && breaks.empty())
    period = 2.0 * std::numbers::pi / std::abs((*tr.wavevector)[0]);

  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double a = std::max(prev, ulo), b = std::min(hs[k], uhi);
    if (b > a) {
      double lo = a;
      if (period && b - a > *period) {
        if (!per_period) per_period = piece(0.0, *period);
        const double n = std::floor((b - a) / *period);
        acc += n * *per_period;
        lo = a + n * *period;
      }
      acc += piece(lo, b);
    }
    out[k] = acc;
    prev = std::max(prev, hs[k]);
  }
  return out;
}

double sphere_integral(const Function& f, std::span<const double> x, double rho, bool absval, double ell) {
  const std::size_t n = x.size();
  auto val = [&](std::span<const double> y) {
    const double v = f.value(y);
    return absval ? std::abs(v) : v;
  };
  std::vector<double> y(n);
  if (n == 1) {
    y[0] = x[0] + rho;
    double s = val(y);
    y[0] = x[0] - rho;
    return s + val(y);
  }
  const auto nphi = static_cast<std::size_t>(std::ceil(4.0 * 2.0 * std::numbers::pi * rho / ell)) + 16;
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(nphi);
  if (n == 2) {
    double s = 0.0;
    for (std::size_t i = 0; i < nphi; ++i) {
      const double th = dphi * static_cast<double>(i);
      y[0] = x[0] + rho * std::cos(th);
      y[1] = x[1] + rho * std::sin(th);
      s += val(y);
    }
    return s * dphi;
  }
  const Rule& gl = gauss_legendre(std::max<std::size_t>(nphi / 2, 8));
  double s = 0.0;
  for (std::size_t j = 0; j < gl.size(); ++j) {
    const double u = gl.nodes[j], st = std::sqrt(std::max(0.0, 1.0 - u * u));
    double ring = 0.0;
    for (std::size_t i = 0; i < nphi; ++i) {
      const double ph = dphi * static_cast<double>(i);
      y[0] = x[0] + rho * st * std::cos(ph);
      y[1] = x[1] + rho * st * std::sin(ph);
      y[2] = x[2] + rho * u;
      ring += val(y);
    }
    s += gl.weights[j] * ring * dphi;
  }
  return s;
}

std::pair<double, double> radial_extent(const Function& f, std::span<const double> x) {
  const FunctionTraits& tr = f.traits();
  if (tr.support_lo.size() != x.size()) return {0.0, kInf};
  double near = 0.0, far = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = tr.support_lo[i], hi = tr.support_hi[i];
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, kInf};
    const double d = std::max({lo - x[i], 0.0, x[i] - hi});
    near += d * d;
    const double e = std::max(std::abs(x[i] - lo), std::abs(x[i] - hi));
    far += e * e;
  }
  return {std::sqrt(near), std::sqrt(far)};
}

double radial_integral(const Function& f, std::span<const double> x, double a, double b, bool absval,
                       const std::function<double(double)>& weight) {
  const FunctionTraits& tr = f.traits();
  const auto [near, far] = radial_extent(f, x);
  a = std::max(a, near);
  b = std::min(b, far);
  if (!(b > a)) return 0.0;
  const double ell = min_axis_scale(tr);
  const std::size_t n = x.size();
  const Fn g = [&](double rho) {
    return weight(rho) * std::pow(rho, static_cast<double>(n - 1)) * sphere_integral(f, x, rho, absval, ell);
  };
  return detail::panels(g, a, b, n == 1 ? 16 : 8, 0.5 * ell, {}).value;
}

// Mean of |A cos(theta0 + k.(y - x))| over B(x, r) from the Fourier series of
// |cos| and the ball mean of a plane wave, Gamma(n/2+1) (2/z)^{n/2} J_{n/2}(z).
double plane_wave_abs_mean(std::size_t n, double amp, double theta0, double kr) {
  const double nu = 0.5 * static_cast<double>(n);
  const double g = std::tgamma(nu + 1.0);
  double sum = 2.0 / std::numbers::pi;
  for (int m = 1; m <= 400; ++m) {
    const double z = 2.0 * m * kr;
    const double lam = g * std::pow(2.0 / z, nu) * std::cyl_bessel_j(nu, z);
    const double c = (m % 2 ? 4.0 : -4.0) / (std::numbers::pi * (4.0 * m * m - 1.0));
    sum += c * std::cos(2.0 * m * theta0) * lam;
  }
  return std::abs(amp) * sum;
}

std::vector<double> cumulative_ball(const Function& f, std::span<const double> x, std::span<const double> rs) {
  std::vector<double> out(rs.size());
  const std::size_t n = x.size();
  if (n == 1) {
    const auto l = cumulative_abs(f, x[0], -1, rs), r = cumulative_abs(f, x[0], 1, rs);
    for (std::size_t k = 0; k < rs.size(); ++k) out[k] = l[k] + r[k];
    return out;
  }
  const FunctionTraits& tr = f.traits();
  if (tr.constant_value) {
    for (std::size_t k = 0; k < rs.size(); ++k) out[k] = std::abs(*tr.constant_value) * ball_volume(n, rs[k]);
    return out;
  }
  // plane waves: closed-form means once the ball holds a few periods
  double kn = 0.0, amp = 0.0, theta0 = 0.0;
  if (tr.wavevector && tr.wavevector->size() == n) {
    std::vector<double> grad(n);
    f.gradient(x, grad);
    double kg = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      kn += (*tr.wavevector)[d] * (*tr.wavevector)[d];
      kg += (*tr.wavevector)[d] * grad[d];
    }
    if (kn > 0.0) {
      const double s = -kg / kn, c = f.value(x);
      amp = std::hypot(c, s);
      theta0 = std::atan2(s, c);
      kn = std::sqrt(kn);
    }
  }
  const auto one = [](double) { return 1.0; };
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    if (kn > 0.0 && kn * rs[k] >= 16.0) {
      out[k] = plane_wave_abs_mean(n, amp, theta0, kn * rs[k]) * ball_volume(n, rs[k]);
      continue;
    }
    if (rs[k] > prev) acc += radial_integral(f, x, prev, rs[k], true, one);
    out[k] = acc;
    prev = std::max(prev, rs[k]);
  }
  return out;
}

double ball_volume(std::size_t n, double r) {
  return std::pow(std::numbers::pi, 0.5 * static_cast<double>(n)) / std::tgamma(0.5 * static_cast<double>(n) + 1.0) *
         std::pow(r, static_cast<double>(n));
}

double sphere_area(std::size_t n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * static_cast<double>(n)) / std::tgamma(0.5 * static_cast<double>(n));
}

std::vector<std::size_t> window_points(const GridND& grid, std::optional<Window> w) {
  std::vector<std::size_t> idx;
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    bool in = true;
    if (w)
      for (double c : x) in = in && c >= w->lo - 1e-12 && c <= w->hi + 1e-12;
    if (in) idx.push_back(i);
  }
  if (idx.empty()) throw Error(ErrorKind::WindowTooNarrow, "no grid nodes inside the evaluation window");
  return idx;
}

}  // namespace detail

ScaleLattice ScaleLattice::dyadic(int jmin, int jmax, double base) {
  if (jmin > jmax || !(base > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "dyadic lattice needs jmin <= jmax");
  ScaleLattice l;
  for (int j = jmin; j <= jmax; ++j) l.scales.push_back(std::ldexp(base, j));
  return l;
}

ScaleLattice ScaleLattice::geometric(double hmin, double hmax, double ratio) {
  if (!(hmin > 0.0) || !(hmax >= hmin) || !(ratio > 1.0))
    throw Error(ErrorKind::ParameterOutOfRange, "geometric lattice needs 0 < hmin <= hmax, ratio > 1");
  ScaleLattice l;
  for (int k = 0;; ++k) {
    const double h = hmin * std::pow(ratio, k);
    l.scales.push_back(h);
    if (h >= hmax * (1.0 - 1e-12)) break;
  }
  return l;
}

ScaleLattice dense_lattice(double hmin, double hmax) { return ScaleLattice::geometric(hmin, hmax, std::pow(2.0, 0.125)); }

void ScaleLattice::validate() {
  if (scales.empty()) throw Error(ErrorKind::ParameterOutOfRange, "empty scale lattice");
  for (double h : scales)
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::ParameterOutOfRange, "scales must be positive");
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
}

namespace {

ScaleLattice checked(ScaleLattice lat) {
  lat.validate();
  return lat;
}

double best(const std::vector<double>& integrals, std::span<const double> hs, std::span<const double> measure,
            double* argmax) {
  double m = 0.0, at = hs.empty() ? 0.0 : hs.front();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double v = integrals[k] / measure[k];
    if (v > m) {
      m = v;
      at = hs[k];
    }
  }
  if (argmax) *argmax = at;
  return m;
}

double one_sided_at(const Function& f, double t, const ScaleLattice& lat0, int dir, double* argmax) {
  const ScaleLattice lat = checked(lat0);
  const auto I = detail::cumulative_abs(f, t, dir, lat.scales);
  return best(I, lat.scales, lat.scales, argmax);
}

MaximalResult one_sided(const SampledFunction1D& f, const ScaleLattice& lat0, std::optional<Window> window, Exec exec,
                        int dir) {
  const ScaleLattice lat = checked(lat0);
  const FunctionPtr ev = f.evaluator();
  std::vector<std::size_t> keep;
  std::size_t excluded = 0;
  const double hmax = lat.scales.back();
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const double t = f.grid[i];
    if (window && (t < window->lo - 1e-12 || t > window->hi + 1e-12)) continue;
    const double reach = t + dir * hmax;
    if (!f.closed_form && (reach < f.grid.t_min() - 1e-12 || reach > f.grid.t_max() + 1e-12)) {
      ++excluded;
      continue;
    }
    keep.push_back(i);
  }
  if (keep.empty()) throw Error(ErrorKind::WindowTooNarrow, "no evaluation point keeps its averaging windows on the samples");
  MaximalResult r;
  r.dim = 1;
  r.lattice = lat.scales;
  r.excluded = excluded;
  r.points.resize(keep.size());
  r.values.resize(keep.size());
  r.argmax.resize(keep.size());
  for_each_index(exec, keep.size(), [&](std::size_t k) {
    const double t = f.grid[keep[k]];
    r.points[k] = t;
    r.values[k] = one_sided_at(*ev, t, lat, dir, &r.argmax[k]);
  });
  return r;
}

}  // namespace

double m_minus_at(const Function& f, double t, const ScaleLattice& lat, double* argmax) {
  return one_sided_at(f, t, lat, -1, argmax);
}

double m_plus_at(const Function& f, double t, const ScaleLattice& lat, double* argmax) {
  return one_sided_at(f, t, lat, 1, argmax);
}

double m_hl_at(const Function& f, std::span<const double> x, const ScaleLattice& lat0, double* argmax) {
  if (x.size() != f.dim() || x.empty() || x.size() > 3)
    throw Error(ErrorKind::ParameterOutOfRange, "m_hl supports dimensions 1 to 3");
  const ScaleLattice lat = checked(lat0);
  const auto I = detail::cumulative_ball(f, x, lat.scales);
  std::vector<double> vol(lat.scales.size());
  for (std::size_t k = 0; k < vol.size(); ++k) vol[k] = detail::ball_volume(x.size(), lat.scales[k]);
  return best(I, lat.scales, vol, argmax);
}

MaximalResult m_minus(const SampledFunction1D& f, const ScaleLattice& lat, std::optional<Window> window, Exec exec) {
  return one_sided(f, lat, window, exec, -1);
}

MaximalResult m_plus(const SampledFunction1D& f, const ScaleLattice& lat, std::optional<Window> window, Exec exec) {
  return one_sided(f, lat, window, exec, 1);
}

MaximalResult m_hl(const SampledFunctionND& f, const ScaleLattice& lat0, std::optional<Window> window, Exec exec) {
  const FunctionPtr ev = f.require_closed_form("m_hl");
  const ScaleLattice lat = checked(lat0);
  const auto idx = detail::window_points(f.grid, window);
  const std::size_t n = f.dim();
  MaximalResult r;
  r.dim = n;
  r.lattice = lat.scales;
  r.points.resize(idx.size() * n);
  r.values.resize(idx.size());
  r.argmax.resize(idx.size());
  for_each_index(exec, idx.size(), [&](std::size_t k) {
    std::span<double> x(r.points.data() + k * n, n);
    f.grid.point(idx[k], x);
    r.values[k] = m_hl_at(*ev, x, lat, &r.argmax[k]);
  });
  return r;
}

Kernel box_kernel() {
  return {"box", [](double t) { return t >= 0.0 && t <= 1.0 ? 1.0 : 0.0; }, 1.0, false, 0.0, 1.0};
}

Kernel inverse_sqrt_kernel() {
  return {"inverse_sqrt", [](double t) { return t > 0.0 && t <= 1.0 ? 1.0 / std::sqrt(t) : 0.0; }, 1.0, true, 0.5,
          2.0};
}

Kernel exp_kernel() {
  return {"exp", [](double t) { return t >= 0.0 ? std::exp(-t) : 0.0; }, kNegligible, false, 0.0, 1.0};
}

Kernel heat_kernel_profile(std::size_t dim, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "heat kernel time must be > 0");
  const double c = std::pow(4.0 * std::numbers::pi * t, -0.5 * static_cast<double>(dim));
  return {"heat", [c, t](double r) { return c * std::exp(-r * r / (4.0 * t)); }, std::sqrt(4.0 * t * kNegligible),
          false, 0.0, 1.0};
}

Kernel unit_ball_kernel(std::size_t dim) {
  const double v = 1.0 / detail::ball_volume(dim, 1.0);
  return {"unit_ball", [v](double r) { return r <= 1.0 ? v : 0.0; }, 1.0, false, 0.0, 1.0};
}

Kernel exp_radial_kernel(std::size_t dim) {
  // integral of e^{-|x|} over R^n = |S^{n-1}| (n-1)!
  const double mass = detail::sphere_area(dim) * std::tgamma(static_cast<double>(dim));
  return {"exp_radial", [](double r) { return std::exp(-r); }, kNegligible, false, 0.0, mass};
}

namespace {

void check_monotone(const Kernel& eta) {
  constexpr int kSamples = 2000;
  double prev = kInf;
  for (int i = 1; i <= kSamples; ++i) {
    const double r = eta.reach * i / kSamples;
    const double v = eta.profile(r);
    if (!(v >= 0.0) || v > prev * (1.0 + 1e-12))
      throw Error(ErrorKind::KernelNotMonotone, "kernel '" + eta.name + "' increases near r=" + std::to_string(r));
    prev = v;
  }
}

// integral_0^reach f(t - tau) eta(tau) dtau
double one_sided_convolution(const Function& f, double t, const Kernel& eta, const QuadratureSpec& quad) {
  const FunctionTraits& tr = f.traits();
  double a = 0.0, b = eta.reach;
  if (!tr.support_lo.empty() && std::isfinite(tr.support_lo[0])) b = std::min(b, t - tr.support_lo[0]);
  if (!tr.support_hi.empty() && std::isfinite(tr.support_hi[0])) a = std::max(a, t - tr.support_hi[0]);
  if (!(b > a)) return 0.0;
  std::vector<double> breaks;
  for (double x : tr.breakpoints) breaks.push_back(t - x);
  std::sort(breaks.begin(), breaks.end());
  const detail::Fn g = [&](double tau) { return f(t - tau) * eta.profile(tau); };
  const double w = panel_width(tr);
  if (eta.singular_at_zero && a == 0.0) {
    const double S = std::min(b, 1.0);
    const double delta = std::ldexp(S, -static_cast<int>(quad.graded_levels));
    Estimate e = detail::graded(g, S, quad.graded_levels, quad.n_singular, breaks, w);
    e.value += f(t) * eta.profile(delta) * delta / (1.0 - eta.singular_power);
    if (b > S) e += detail::panels(g, S, b, quad.n_singular, w, breaks);
    return e.value;
  }
  return detail::panels(g, a, b, quad.n_singular, w, breaks).value;
}

void finish(DominationReport& r, const QuadratureSpec& quad) {
  double m = 0.0;
  r.max_excess = -kInf;
  for (std::size_t i = 0; i < r.lhs.size(); ++i) {
    r.max_excess = std::max(r.max_excess, r.lhs[i] - r.rhs[i]);
    m = std::max(m, r.rhs[i]);
  }
  r.tolerance = quad.tolerance * (1.0 + m);
  r.holds = r.max_excess <= r.tolerance;
}

}  // namespace

DominationReport lorente_domination_check(const SampledFunction1D& f, const Kernel& eta, const ScaleLattice& lat0,
                                          const QuadratureSpec& quad, std::optional<Window> window) {
  quad.validate();
  check_monotone(eta);
  const ScaleLattice lat = checked(lat0);
  const MaximalResult m = m_minus(f, lat, window, quad.exec);
  const FunctionPtr ev = f.evaluator();
  DominationReport r;
  r.kernel = eta.name;
  r.kernel_mass = eta.mass;
  r.points = m.points;
  r.lhs.resize(m.size());
  r.rhs.resize(m.size());
  for_each_index(quad.exec, m.size(), [&](std::size_t k) {
    r.lhs[k] = std::abs(one_sided_convolution(*ev, m.points[k], eta, quad));
    r.rhs[k] = m.values[k] * eta.mass;
  });
  finish(r, quad);
  return r;
}

DominationReport radial_domination_check(const SampledFunctionND& f, const Kernel& eta, const ScaleLattice& lat0,
                                         const QuadratureSpec& quad, std::optional<Window> window) {
  quad.validate();
  check_monotone(eta);
  const FunctionPtr ev = f.require_closed_form("radial_domination_check");
  const ScaleLattice lat = checked(lat0);
  const MaximalResult m = m_hl(f, lat, window, quad.exec);
  const std::size_t n = f.dim();
  DominationReport r;
  r.kernel = eta.name;
  r.kernel_mass = eta.mass;
  r.points = m.points;
  r.lhs.resize(m.size());
  r.rhs.resize(m.size());
  for_each_index(quad.exec, m.size(), [&](std::size_t k) {
    std::span<const double> x(m.points.data() + k * n, n);
    double conv;
    if (ev->traits().constant_value) {
      conv = *ev->traits().constant_value * eta.mass;
    } else {
      conv = detail::radial_integral(*ev, x, 0.0, eta.reach, false, eta.profile);
    }
    r.lhs[k] = std::abs(conv);
    r.rhs[k] = m.values[k] * eta.mass;
  });
  finish(r, quad);
  return r;
}

namespace {

void fill_ratio(MaximalResult& r, const std::vector<double>& denom) {
  double dmax = 0.0;
  for (double d : denom) dmax = std::max(dmax, d);
  r.ratio.assign(r.size(), std::numeric_limits<double>::quiet_NaN());
  r.constant = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(denom[k] > 1e-12 * dmax)) {
      ++r.excluded;
      continue;
    }
    r.ratio[k] = r.values[k] / denom[k];
    r.constant = std::max(r.constant, r.ratio[k]);
  }
}

}  // namespace

MaximalResult order_sup_fracderiv(const SampledFunction1D& f, std::span<const double> alphas,
                                  const ScaleLattice& lat0, const QuadratureSpec& quad, std::optional<Window> window) {
  quad.validate();
  if (alphas.empty()) throw Error(ErrorKind::ParameterOutOfRange, "empty order lattice");
  std::vector<FracOrder> orders;
  for (double a : alphas) orders.push_back(FracOrder::alpha(a));
  const ScaleLattice lat = checked(lat0);
  const MaximalResult mf = m_minus(f, lat, window, quad.exec);
  const FunctionPtr ev = f.evaluator();
  const FunctionPtr d1 = derivative(ev);
  MaximalResult r;
  r.dim = 1;
  r.points = mf.points;
  r.lattice.assign(alphas.begin(), alphas.end());
  r.excluded = mf.excluded;
  r.values.resize(mf.size());
  r.argmax.resize(mf.size());
  std::vector<double> denom(mf.size());
  for_each_index(quad.exec, mf.size(), [&](std::size_t k) {
    const double t = mf.points[k];
    const auto d = marchaud_left_at(*ev, t, orders, quad);
    double m = 0.0, at = alphas[0];
    for (std::size_t j = 0; j < d.size(); ++j)
      if (std::abs(d[j].value) > m) {
        m = std::abs(d[j].value);
        at = alphas[j];
      }
    r.values[k] = m;
    r.argmax[k] = at;
    denom[k] = m_minus_at(*d1, t, lat) + mf.values[k];
  });
  fill_ratio(r, denom);
  return r;
}

namespace detail {

void fill_order_ratio(MaximalResult& r, const std::vector<double>& denom) { fill_ratio(r, denom); }

}  // namespace detail

}  // namespace fraclab
