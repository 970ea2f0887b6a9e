#include "fraclab/fracderiv.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "fraclab/error.hpp"
#include "fraclab/exec.hpp"
#include "ray.hpp"

namespace fraclab {
namespace {

using detail::Estimate;

// f(t - tau), memoized so that several orders share evaluations.
class LeftRay {
 public:
  LeftRay(const Function& f, double t) : f_(f), t_(t) {}
  double operator()(double tau) const {
    auto it = memo_.find(tau);
    if (it != memo_.end()) return it->second;
    const double v = f_(t_ - tau);
    memo_.emplace(tau, v);
    return v;
  }

 private:
  const Function& f_;
  double t_;
  mutable std::unordered_map<double, double> memo_;
};

double feature_scale(const FunctionTraits& tr) {
  return std::isfinite(tr.length_scale) && tr.length_scale > 0.0 ? tr.length_scale : 1.0;
}

// Breakpoints of f mapped to tau = t - b, kept where tau > from, ascending.
std::vector<double> tau_breaks(const FunctionTraits& tr, double t, double from) {
  std::vector<double> out;
  for (double b : tr.breakpoints) {
    const double tau = t - b;
    if (tau > from) out.push_back(tau);
  }
  std::sort(out.begin(), out.end());
  return out;
}

detail::RayInfo left_ray_info(const Function& f, double t, double start, const QuadratureSpec& quad) {
  const FunctionTraits& tr = f.traits();
  detail::RayInfo info;
  info.scale = feature_scale(tr);
  info.breaks = tau_breaks(tr, t, start);
  if (tr.constant_value) {
    info.constant = *tr.constant_value;
  } else if (!tr.support_lo.empty() && std::isfinite(tr.support_lo[0])) {
    info.reach = t - tr.support_lo[0];
  } else if (tr.decay == DecayClass::exponential_left && tr.left_decay_rate > 0.0) {
    info.exp_rate = tr.left_decay_rate;
    info.exp_amplitude = std::abs(f(t));
  } else if (tr.wavevector && !tr.wavevector->empty() && (*tr.wavevector)[0] != 0.0) {
    info.period = 2.0 * std::numbers::pi / std::abs((*tr.wavevector)[0]);
  } else {
    info.bound = tr.sup_abs;
    info.truncation = quad.tail_radius.value_or(1e4 * info.scale);
  }
  return info;
}

// Tail of f(t - tau) tau^{-beta} beyond S; sums are split into their terms
// when the sum as a whole has no usable decay description.
Estimate left_tail(const Function& f, double t, double S, double beta, const QuadratureSpec& quad,
                   const LeftRay* ray) {
  const FunctionTraits& tr = f.traits();
  const bool finite_reach = !tr.support_lo.empty() && std::isfinite(tr.support_lo[0]);
  if (!tr.constant_value && !finite_reach) {
    const auto terms = f.terms();
    if (!terms.empty()) {
      Estimate e;
      for (const auto& [c, g] : terms) {
        if (c == 0.0) continue;
        const Estimate p = left_tail(*g, t, S, beta, quad, nullptr);
        e.value += c * p.value;
        e.error += std::abs(c) * p.error;
      }
      return e;
    }
  }
  const auto info = left_ray_info(f, t, S, quad);
  if (ray) return detail::ray_tail([&](double tau) { return (*ray)(tau); }, S, beta, info, quad.n_tail);
  return detail::ray_tail([&](double tau) { return f(t - tau); }, S, beta, info, quad.n_tail);
}

void check_converged(const PointValue& v, const QuadratureSpec& quad, const char* what, double t) {
  if (!std::isfinite(v.value) || v.error > quad.tolerance * (1.0 + std::abs(v.value)))
    throw Error(ErrorKind::QuadratureNotConverged,
                std::string(what) + " at t=" + std::to_string(t) + ": error estimate " + std::to_string(v.error));
}

PointValue left_core(const Function& f, double t, const FracOrder& alpha, const QuadratureSpec& quad,
                     const LeftRay& ray, double f0, double f1, double f2) {
  const double a = alpha.value();
  const double S = quad.split_point;
  const double delta = std::ldexp(S, -static_cast<int>(quad.graded_levels));
  const auto breaks = tau_breaks(f.traits(), t, 0.0);
  Estimate inner;
  double analytic;
  if (quad.substitution == Substitution::taylor_subtract) {
    auto g = [&](double tau) { return (ray(tau) - f0 + tau * f1) * std::pow(tau, -1.0 - a); };
    inner = detail::graded(g, S, quad.graded_levels, quad.n_singular, breaks, 0.5 * feature_scale(f.traits()));
    // innermost cell: f(t - tau) - f(t) + tau f'(t) ~ f''(t) tau^2 / 2
    inner.value += 0.5 * f2 * std::pow(delta, 2.0 - a) / (2.0 - a);
    analytic = -f1 * std::pow(S, 1.0 - a) / (1.0 - a) - f0 * std::pow(S, -a) / a;
  } else {
    // u = log(tau): dtau tau^{-1-a} = tau^{-a} du
    auto g = [&](double u) {
      const double tau = std::exp(u);
      return (ray(tau) - f0) * std::pow(tau, -a);
    };
    std::vector<double> ubreaks;
    for (double b : breaks)
      if (b > delta && b < S) ubreaks.push_back(std::log(b));
    inner = detail::panels(g, std::log(delta), std::log(S), quad.n_singular,
                           0.5 * std::min(1.0, feature_scale(f.traits()) / S), ubreaks);
    inner.value += -f1 * std::pow(delta, 1.0 - a) / (1.0 - a) + 0.5 * f2 * std::pow(delta, 2.0 - a) / (2.0 - a);
    analytic = -f0 * std::pow(S, -a) / a;
  }
  const Estimate outer = left_tail(f, t, S, 1.0 + a, quad, &ray);
  const double c = alpha.inv_gamma_neg();
  return {c * (inner.value + outer.value + analytic), std::abs(c) * (inner.error + outer.error)};
}

std::vector<std::size_t> window_nodes(const Grid1D& g, std::optional<Window> w) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g[i];
    if (!w || (t >= w->lo - 1e-12 && t <= w->hi + 1e-12)) idx.push_back(i);
  }
  if (idx.empty()) throw Error(ErrorKind::WindowTooNarrow, "no grid nodes inside the evaluation window");
  return idx;
}

template <class Op>
FracDerivResult on_grid(const SampledFunction1D& f, const FracOrder& alpha, const QuadratureSpec& quad,
                        std::optional<Window> window, Side side, Op op) {
  quad.validate();
  const auto idx = window_nodes(f.grid, window);
  FracDerivResult r{std::vector<double>(idx.size()), std::vector<double>(idx.size()),
                    std::vector<double>(idx.size()), alpha, side};
  for_each_index(quad.exec, idx.size(), [&](std::size_t k) {
    const double t = f.grid[idx[k]];
    const PointValue v = op(t);
    r.t[k] = t;
    r.values[k] = v.value;
    r.error[k] = v.error;
  });
  return r;
}

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<PointValue> marchaud_left_at(const Function& f, double t, std::span<const FracOrder> alphas,
                                         const QuadratureSpec& quad) {
  quad.validate();
  if (f.dim() != 1) throw Error(ErrorKind::ParameterOutOfRange, "fractional derivatives are 1D");
  std::vector<PointValue> out(alphas.size());
  const FunctionTraits& tr = f.traits();
  if (tr.constant_value) return out;  // integrand vanishes identically
  const LeftRay ray(f, t);
  const double f0 = f(t), f1 = f.d1(t), f2 = f.d2(t);
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    out[k] = left_core(f, t, alphas[k], quad, ray, f0, f1, f2);
    check_converged(out[k], quad, "marchaud", t);
  }
  return out;
}

PointValue marchaud_left_at(const Function& f, double t, const FracOrder& alpha, const QuadratureSpec& quad) {
  return marchaud_left_at(f, t, std::span<const FracOrder>(&alpha, 1), quad)[0];
}

PointValue marchaud_right_at(const FunctionPtr& f, double t, const FracOrder& alpha, const QuadratureSpec& quad) {
  const auto r = reflect(f);
  return marchaud_left_at(*r, -t, alpha, quad);
}

PointValue weyl_integral_at(const Function& f, double t, const FracOrder& alpha, const QuadratureSpec& quad) {
  quad.validate();
  if (f.dim() != 1) throw Error(ErrorKind::ParameterOutOfRange, "fractional integrals are 1D");
  const FunctionTraits& tr = f.traits();
  if (tr.constant_value && *tr.constant_value == 0.0) return {};
  const bool decays = (!tr.support_lo.empty() && std::isfinite(tr.support_lo[0])) ||
                      (tr.decay == DecayClass::exponential_left && tr.left_decay_rate > 0.0);
  if (!decays) throw Error(ErrorKind::TailDivergence, "Weyl integral of a function that does not decay to the left");
  const double a = alpha.value();
  const double S = quad.split_point;
  const double delta = std::ldexp(S, -static_cast<int>(quad.graded_levels));
  const LeftRay ray(f, t);
  const double f0 = f(t), f1 = f.d1(t);
  auto g = [&](double tau) { return ray(tau) * std::pow(tau, a - 1.0); };
  Estimate e = detail::graded(g, S, quad.graded_levels, quad.n_singular, tau_breaks(tr, t, 0.0),
                              0.5 * feature_scale(tr));
  e.value += f0 * std::pow(delta, a) / a - f1 * std::pow(delta, a + 1.0) / (a + 1.0);
  e += left_tail(f, t, S, 1.0 - a, quad, &ray);
  const double c = 1.0 / gamma(a);
  PointValue v{c * e.value, c * e.error};
  check_converged(v, quad, "weyl", t);
  return v;
}

FracDerivResult marchaud_left(const SampledFunction1D& f, const FracOrder& alpha, const QuadratureSpec& quad,
                              std::optional<Window> window) {
  const FunctionPtr ev = f.evaluator();
  return on_grid(f, alpha, quad, window, Side::left,
                 [&](double t) { return marchaud_left_at(*ev, t, alpha, quad); });
}

FracDerivResult marchaud_right(const SampledFunction1D& f, const FracOrder& alpha, const QuadratureSpec& quad,
                               std::optional<Window> window) {
  const FunctionPtr r = reflect(f.evaluator());
  return on_grid(f, alpha, quad, window, Side::right,
                 [&](double t) { return marchaud_left_at(*r, -t, alpha, quad); });
}

FracDerivResult weyl_integral(const SampledFunction1D& f, const FracOrder& alpha, const QuadratureSpec& quad,
                              std::optional<Window> window) {
  const FunctionPtr ev = f.evaluator();
  return on_grid(f, alpha, quad, window, Side::left,
                 [&](double t) { return weyl_integral_at(*ev, t, alpha, quad); });
}

FtfcReport ftfc_compose(const FunctionPtr& f, const FracOrder& alpha, const QuadratureSpec& quad,
                        double points_per_scale) {
  quad.validate();
  const FunctionTraits& tr = f->traits();
  if (f->dim() != 1 || !(tr.decay == DecayClass::compact_support || tr.decay == DecayClass::gaussian) ||
      !tr.smooth)
    throw Error(ErrorKind::ParameterOutOfRange, "ftfc_compose needs a smooth bump or gaussian");
  if (!(points_per_scale >= 4.0)) throw Error(ErrorKind::ParameterOutOfRange, "points_per_scale must be >= 4");
  const double lo = tr.support_lo[0], hi = tr.support_hi[0];
  const double c = 0.5 * (lo + hi);
  const double half = std::min(0.5 * (hi - lo), 4.0 * tr.length_scale);
  const Window interior{c - 0.5 * half, c + 0.5 * half};

  const double h0 = tr.length_scale / points_per_scale;
  const auto n = static_cast<std::size_t>(std::ceil((interior.hi - lo) / h0)) + 1;
  const Grid1D grid(lo, interior.hi, n);
  std::vector<double> g(n);
  for_each_index(quad.exec, n, [&](std::size_t i) { g[i] = weyl_integral_at(*f, grid[i], alpha, quad).value; });
  const FunctionPtr gi = make_interpolant(grid, std::move(g), DecayClass::exponential_left);

  const auto idx = window_nodes(grid, interior);
  std::vector<double> d(idx.size());
  QuadratureSpec q = quad;
  q.tolerance = std::max(quad.tolerance, 1e-4);  // piecewise-cubic data: estimate is only indicative
  for_each_index(quad.exec, idx.size(), [&](std::size_t k) {
    const double t = grid[idx[k]];
    d[k] = marchaud_left_at(*gi, t, alpha, q).value - (*f)(t);
  });
  FtfcReport r;
  r.alpha = alpha.value();
  r.spacing = grid.spacing();
  r.interior = interior;
  double l2 = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    r.sup_distance = std::max(r.sup_distance, std::abs(d[k]));
    const double w = (k == 0 || k + 1 == d.size()) ? 0.5 : 1.0;
    l2 += w * d[k] * d[k] * grid.spacing();
  }
  r.l2_distance = std::sqrt(l2);
  return r;
}

SampledFunction1D spectral_fracderiv(const SampledFunction1D& f, const FracOrder& alpha) {
  const std::size_t n = f.grid.size();
  if (n < 3) throw Error(ErrorKind::NonPeriodicInput, "too few samples");
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  if (std::abs(f.values.front() - f.values.back()) > 1e-9 * std::max(1.0, m))
    throw Error(ErrorKind::NonPeriodicInput, "first and last samples differ");
  const std::size_t N = n - 1;  // last sample repeats the first
  const double L = f.grid.t_max() - f.grid.t_min();
  const double a = alpha.value();
  std::vector<double> in(f.values.begin(), f.values.begin() + static_cast<std::ptrdiff_t>(N));
  std::vector<std::complex<double>> spec(N / 2 + 1);
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(N), in.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                               FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(N), reinterpret_cast<fftw_complex*>(spec.data()), in.data(),
                               FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double xi = 2.0 * std::numbers::pi * static_cast<double>(k) / L;
    std::complex<double> mult;
    if (k == 0) {
      mult = 0.0;
    } else if (N % 2 == 0 && k == N / 2) {
      mult = std::pow(xi, a) * std::cos(0.5 * std::numbers::pi * a);
    } else {
      mult = std::pow(xi, a) * std::polar(1.0, 0.5 * std::numbers::pi * a);
    }
    spec[k] *= mult / static_cast<double>(N);
  }
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  std::vector<double> out(in);
  out.push_back(in.front());
  return {f.grid, std::move(out), nullptr, DecayClass::bounded};
}

SweepReport derivative_limit_sweep(const SampledFunction1D& f, std::span<const double> alphas, double p,
                                   const Weight& w, const QuadratureSpec& quad, std::optional<Window> window) {
  quad.validate();
  if (alphas.empty()) throw Error(ErrorKind::ParameterOutOfRange, "empty order list");
  std::vector<FracOrder> orders;
  for (double a : alphas) orders.push_back(FracOrder::alpha(a));
  const FunctionPtr ev = f.evaluator();
  const auto idx = window_nodes(f.grid, window);
  const Window win = window.value_or(Window{f.grid.t_min(), f.grid.t_max()});
  const std::size_t na = orders.size(), n = f.grid.size();

  std::vector<std::vector<PointValue>> vals(idx.size());
  for_each_index(quad.exec, idx.size(), [&](std::size_t k) {
    vals[k] = marchaud_left_at(*ev, f.grid[idx[k]], orders, quad);
  });
  const SampledWeight sw = sample_weight(w, f.grid);
  SweepReport rep;
  for (std::size_t j = 0; j < na; ++j) {
    std::vector<double> e_der(n, 0.0), e_fun(n, 0.0), est(n, 0.0);
    double sup_der = 0.0, sup_fun = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double t = f.grid[idx[k]];
      const double d = vals[k][j].value;
      e_der[idx[k]] = d - ev->d1(t);
      e_fun[idx[k]] = d - (*ev)(t);
      est[idx[k]] = vals[k][j].error;
      sup_der = std::max(sup_der, std::abs(e_der[idx[k]]));
      sup_fun = std::max(sup_fun, std::abs(e_fun[idx[k]]));
    }
    const double err = weighted_lp_norm(sw.grid, est, sw.values, p, win);
    const double a = alphas[j];
    rep.rows.push_back({a, "lp_error_to_derivative", weighted_lp_norm(sw.grid, e_der, sw.values, p, win), err});
    rep.rows.push_back({a, "lp_error_to_function", weighted_lp_norm(sw.grid, e_fun, sw.values, p, win), err});
    rep.rows.push_back({a, "sup_error_to_derivative", sup_der, 0.0});
    rep.rows.push_back({a, "sup_error_to_function", sup_fun, 0.0});
  }
  rep.sort_rows();
  return rep;
}

}  // namespace fraclab
