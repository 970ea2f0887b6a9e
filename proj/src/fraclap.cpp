#include "fraclab/fraclap.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "fraclab/error.hpp"
#include "fraclab/exec.hpp"
#include "fraclab/maximal.hpp"
#include "fraclab/quadrature.hpp"
#include "maximal_detail.hpp"
#include "ray.hpp"

namespace fraclab {
namespace {

using detail::Estimate;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kHermiteCap = 200;
constexpr std::size_t kTensorCap = 4'000'000;
// e^{-z^2/4} below 1e-19 past z = 13.3 kernel widths sqrt(t)
constexpr double kKernelCut = 13.3;

double axis_scale(const FunctionTraits& tr, std::size_t i) {
  const double l = i < tr.axis_scales.size() ? tr.axis_scales[i] : tr.length_scale;
  return l > 0.0 ? l : kInf;
}

bool finite_box(const FunctionTraits& tr, std::size_t n) {
  if (tr.support_lo.size() < n || tr.support_hi.size() < n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(tr.support_lo[i]) || !std::isfinite(tr.support_hi[i])) return false;
  return true;
}

double feature(const FunctionTraits& tr) {
  return std::isfinite(tr.length_scale) && tr.length_scale > 0.0 ? tr.length_scale : 1.0;
}

std::size_t product(const std::vector<std::size_t>& m) {
  std::size_t p = 1;
  for (std::size_t v : m) p *= v;
  return p;
}

// Contracts a row-major tensor (last axis fastest) against per-axis kernels K
// and their second derivatives K2. Returns (sum K f, sum Laplacian-K f).
std::pair<double, double> contract(std::vector<double> A, const std::vector<std::vector<double>>& K,
                                   const std::vector<std::vector<double>>& K2, bool lap) {
  std::vector<double> B(lap ? A.size() : 0, 0.0);
  for (std::size_t ax = K.size(); ax-- > 0;) {
    const std::size_t m = K[ax].size();
    const std::size_t outer = A.size() / m;
    std::vector<double> A2(outer, 0.0), B2(lap ? outer : 0, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      const double* a = A.data() + o * m;
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += K[ax][j] * a[j];
      A2[o] = s;
      if (lap) {
        const double* b = B.data() + o * m;
        double t = 0.0;
        for (std::size_t j = 0; j < m; ++j) t += K[ax][j] * b[j] + K2[ax][j] * a[j];
        B2[o] = t;
      }
    }
    A = std::move(A2);
    B = std::move(B2);
  }
  return {A[0], lap ? B[0] : 0.0};
}

// e^{t Laplacian} f and its Laplacian at single points. Per axis the kernel
// variable is discretized by Gauss-Hermite (narrow kernels), a trapezoid rule
// (band-limited data: aliasing error below e^{-40}) or Gauss-Legendre panels
// over the support box (compact data, wide kernels).
class HeatOperator {
 public:
  struct Value {
    double h = 0.0;
    double lap = 0.0;
  };

  explicit HeatOperator(const Function& f) : f_(f), n_(f.dim()) {
    const FunctionTraits& tr = f.traits();
    ell_.resize(n_);
    band_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      ell_[i] = axis_scale(tr, i);
      // f-hat of a unit gaussian is below e^{-37} past 8.6
      if (tr.wavevector)
        band_[i] = std::abs((*tr.wavevector)[i]) * (1.0 + 1e-9);
      else if (std::isfinite(ell_[i]))
        band_[i] = 8.6 / ell_[i];
    }
    compact_ = tr.decay == DecayClass::compact_support || !tr.smooth;
    bandlimited_ = tr.smooth && (tr.decay == DecayClass::gaussian || tr.decay == DecayClass::bounded);
    box_ = finite_box(tr, n_);
    if (box_) {
      lo_ = tr.support_lo;
      hi_ = tr.support_hi;
      if (n_ == 1) breaks_ = tr.breakpoints;
      const std::size_t order = n_ == 1 ? 16 : 8;
      const double stretch = n_ == 3 ? 1.5 : 1.0;
      bx_.resize(n_);
      bw_.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        const double width = std::isfinite(ell_[i]) ? stretch * ell_[i] : hi_[i] - lo_[i];
        const NodeSet ns = composite(lo_[i], hi_[i], order, width, breaks_);
        bx_[i] = ns.x;
        bw_[i] = ns.w;
        box_sizes_.push_back(ns.size());
      }
      if (product(box_sizes_) > kTensorCap) box_ = false;
    }
    if (compact_ && !box_)
      throw Error(ErrorKind::TruncationBudgetExceeded, f.name() + ": support box too large for the heat operator");
  }

  Value operator()(std::span<const double> x, double t, bool lap) const {
    if (compact_) {
      bool wide = true;
      for (std::size_t i = 0; i < n_; ++i) wide = wide && 2.0 * std::sqrt(t) >= std::min(ell_[i], hi_[i] - lo_[i]);
      if (wide) return boxsum(x, t, lap);
      return local(x, t, lap);
    }
    double cost = 1.0;
    for (std::size_t i = 0; i < n_; ++i) cost *= axis_plan(i, t).count;
    if (box_ && cost > static_cast<double>(product(box_sizes_))) return boxsum(x, t, lap);
    if (cost > static_cast<double>(kTensorCap))
      throw Error(ErrorKind::TruncationBudgetExceeded,
                  "heat kernel at t=" + std::to_string(t) + " needs " + std::to_string(cost) + " nodes");
    std::vector<Axis> axes(n_);
    for (std::size_t i = 0; i < n_; ++i) axes[i] = axis_rule(i, x[i], t);
    return tensor(axes, lap);
  }

  /// Integral of f over R^n when finite.
  std::optional<double> mass() const {
    const auto& tr = f_.traits();
    if (tr.total_mass) return tr.total_mass;
    if (!box_) return std::nullopt;
    build_box();
    std::vector<std::vector<double>> K2;
    return contract(F_, bw_, K2, false).first;
  }

  /// Farthest kernel offset the rules reach at time t.
  double radius(double t) const {
    if (box_ && (compact_ || 2.0 * std::sqrt(t) > *std::min_element(ell_.begin(), ell_.end()))) {
      double d = 0.0;
      for (std::size_t i = 0; i < n_; ++i) d += std::pow(hi_[i] - lo_[i], 2);
      return std::max(std::sqrt(d), kKernelCut * std::sqrt(t));
    }
    return kKernelCut * std::sqrt(t * static_cast<double>(n_));
  }

 private:
  // nodes y_j along one axis with kernel weights K_j and second-derivative weights K2_j
  struct Axis {
    std::vector<double> y, K, K2;
  };

  enum class Kind { constant, hermite, trapezoid };
  struct Plan {
    Kind kind;
    double count;
    double h = 0.0;
  };

  Plan axis_plan(std::size_t i, double t) const {
    if (!std::isfinite(ell_[i]) && !(band_[i] > 0.0)) return {Kind::constant, 1.0};
    const double st = std::sqrt(t);
    const double a = std::isfinite(ell_[i]) ? 2.0 * st / ell_[i] : 0.0;
    const double n_gh = 20.0 + std::ceil(10.0 * a * a);
    if (bandlimited_ && band_[i] > 0.0) {
      const double h = 2.0 * std::numbers::pi / (band_[i] + std::sqrt(40.0 / t));
      const double n_tr = 2.0 * std::ceil(kKernelCut * st / h) + 1.0;
      if (n_tr < n_gh || n_gh > static_cast<double>(kHermiteCap)) return {Kind::trapezoid, n_tr, h};
    }
    if (n_gh > static_cast<double>(kHermiteCap)) return {Kind::hermite, kInf};
    return {Kind::hermite, n_gh};
  }

  Axis axis_rule(std::size_t i, double xi, double t) const {
    Axis ax;
    const Plan p = axis_plan(i, t);
    if (p.kind == Kind::constant) {
      ax.y = {xi};
      ax.K = {1.0};
      ax.K2 = {0.0};
      return ax;
    }
    if (p.kind == Kind::hermite) {
      const Rule& r = gauss_hermite(static_cast<std::size_t>(p.count));
      const double c = 2.0 * std::sqrt(t), norm = 1.0 / std::sqrt(std::numbers::pi);
      for (std::size_t j = 0; j < r.size(); ++j) {
        const double z = r.nodes[j], k = r.weights[j] * norm;
        ax.y.push_back(xi - c * z);
        ax.K.push_back(k);
        ax.K2.push_back(k * (z * z / t - 0.5 / t));
      }
      return ax;
    }
    const long J = (static_cast<long>(p.count) - 1) / 2;
    const double c = p.h / std::sqrt(4.0 * std::numbers::pi * t);
    for (long j = -J; j <= J; ++j) {
      const double d = p.h * static_cast<double>(j);
      const double k = c * std::exp(-d * d / (4.0 * t));
      ax.y.push_back(xi - d);
      ax.K.push_back(k);
      ax.K2.push_back(k * (d * d / (4.0 * t * t) - 0.5 / t));
    }
    return ax;
  }

  Value tensor(const std::vector<Axis>& axes, bool lap) const {
    std::vector<std::size_t> m(n_);
    std::vector<std::vector<double>> K(n_), K2(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      m[i] = axes[i].y.size();
      K[i] = axes[i].K;
      K2[i] = axes[i].K2;
    }
    std::vector<double> F(product(m));
    std::vector<std::size_t> id(n_, 0);
    std::vector<double> y(n_);
    for (std::size_t k = 0; k < F.size(); ++k) {
      for (std::size_t i = 0; i < n_; ++i) y[i] = axes[i].y[id[i]];
      F[k] = f_.value(y);
      for (std::size_t i = n_; i-- > 0;) {
        if (++id[i] < m[i]) break;
        id[i] = 0;
      }
    }
    const auto [h, l] = contract(std::move(F), K, K2, lap);
    return {h, l};
  }

  static void kernels(std::span<const double> x, double t, const std::vector<std::vector<double>>& nodes,
                      const std::vector<std::vector<double>>& weights, std::vector<std::vector<double>>& K,
                      std::vector<std::vector<double>>& K2) {
    const std::size_t n = nodes.size();
    const double c = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
    K.resize(n);
    K2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t m = nodes[i].size();
      K[i].resize(m);
      K2[i].resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        const double d = x[i] - nodes[i][j];
        const double k = weights[i][j] * c * std::exp(-d * d / (4.0 * t));
        K[i][j] = k;
        K2[i][j] = k * (d * d / (4.0 * t * t) - 0.5 / t);
      }
    }
  }

  void build_box() const {
    std::call_once(once_, [&] {
      std::vector<double> F(product(box_sizes_));
      std::vector<std::size_t> id(n_, 0);
      std::vector<double> y(n_);
      for (std::size_t k = 0; k < F.size(); ++k) {
        for (std::size_t i = 0; i < n_; ++i) y[i] = bx_[i][id[i]];
        F[k] = f_.value(y);
        for (std::size_t i = n_; i-- > 0;) {
          if (++id[i] < box_sizes_[i]) break;
          id[i] = 0;
        }
      }
      F_ = std::move(F);
    });
  }

  Value boxsum(std::span<const double> x, double t, bool lap) const {
    build_box();
    std::vector<std::vector<double>> K, K2;
    kernels(x, t, bx_, bw_, K, K2);
    const auto [h, l] = contract(F_, K, K2, lap);
    return {h, l};
  }

  // Narrow kernel over compact data: panels of width ~2 sqrt(t) around x.
  Value local(std::span<const double> x, double t, bool lap) const {
    const double R = kKernelCut * std::sqrt(t);
    std::vector<std::vector<double>> nodes(n_), weights(n_);
    std::vector<std::size_t> m(n_);
    const std::size_t order = n_ == 1 ? 16 : 8;
    for (std::size_t i = 0; i < n_; ++i) {
      const double lo = std::max(x[i] - R, lo_[i]), hi = std::min(x[i] + R, hi_[i]);
      if (!(hi > lo)) return {};
      const double width = std::min(2.0 * std::sqrt(t), ell_[i]);
      const NodeSet ns = composite(lo, hi, order, width, breaks_);
      nodes[i] = ns.x;
      weights[i] = ns.w;
      m[i] = ns.size();
    }
    if (product(m) > kTensorCap)
      throw Error(ErrorKind::TruncationBudgetExceeded, "heat kernel of compact data exceeds the node budget");
    std::vector<double> F(product(m));
    std::vector<std::size_t> id(n_, 0);
    std::vector<double> y(n_);
    for (std::size_t k = 0; k < F.size(); ++k) {
      for (std::size_t i = 0; i < n_; ++i) y[i] = nodes[i][id[i]];
      F[k] = f_.value(y);
      for (std::size_t i = n_; i-- > 0;) {
        if (++id[i] < m[i]) break;
        id[i] = 0;
      }
    }
    std::vector<std::vector<double>> K, K2;
    kernels(x, t, nodes, weights, K, K2);
    const auto [h, l] = contract(std::move(F), K, K2, lap);
    return {h, l};
  }

  const Function& f_;
  std::size_t n_;
  std::vector<double> ell_, band_;
  bool compact_ = false, bandlimited_ = false, box_ = false;
  std::vector<double> lo_, hi_, breaks_;
  std::vector<std::vector<double>> bx_, bw_;
  std::vector<std::size_t> box_sizes_;
  mutable std::once_flag once_;
  mutable std::vector<double> F_;
};

void check_converged(const PointValue& v, const QuadratureSpec& quad, const char* what) {
  if (!std::isfinite(v.value) || v.error > quad.tolerance * (1.0 + std::abs(v.value)))
    throw Error(ErrorKind::QuadratureNotConverged,
                std::string(what) + ": error estimate " + std::to_string(v.error) + " for value " +
                    std::to_string(v.value));
}

// ---- semigroup time integral ---------------------------------------------

struct TimePanel {
  double a, b;
  bool log;  // integrate in u = log t
  std::size_t hi_begin, lo_begin;
};

// Shared nodes in t for every point and order.
struct TimeRule {
  std::vector<TimePanel> panels;
  std::vector<double> t;  // node times (hi rule then lo rule per panel)
  std::vector<double> w;  // weights in t (small) or u (log)
  double T = 1.0;
  double L = 0.0;                // large-time limit
  std::optional<double> mass;    // for the tail past T
  std::size_t n = 1;
};

void add_panel(TimeRule& r, double a, double b, bool log, std::size_t order) {
  TimePanel p{a, b, log, 0, 0};
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  auto push = [&](const Rule& rule) {
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double v = mid + half * rule.nodes[i];
      r.t.push_back(log ? std::exp(v) : v);
      r.w.push_back(half * rule.weights[i]);
    }
  };
  p.hi_begin = r.t.size();
  push(gauss_legendre(order));
  p.lo_begin = r.t.size();
  push(gauss_legendre(order / 2));
  r.panels.push_back(p);
}

TimeRule time_rule(const Function& f, const HeatOperator& op, const QuadratureSpec& quad) {
  const FunctionTraits& tr = f.traits();
  const std::size_t n = f.dim();
  TimeRule r;
  r.n = n;
  r.L = *tr.heat_limit;
  if (tr.wavevector) {
    double k2 = 0.0;
    for (double k : *tr.wavevector) k2 += k * k;
    r.T = 60.0 / k2;  // e^{-60} left
  } else {
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double l = axis_scale(tr, i);
      if (std::isfinite(l)) scale = std::max(scale, l);
      scale = std::max(scale, tr.support_hi[i] - tr.support_lo[i]);
    }
    r.T = std::ldexp(scale * scale, 24);
    r.mass = op.mass();
  }
  const std::size_t order = quad.n_singular;
  double hi = 1.0;
  for (std::size_t k = 0; k < quad.time_levels; ++k) {
    add_panel(r, 0.5 * hi, hi, false, order);
    hi *= 0.5;
  }
  if (r.T > 1.0) {
    const double U = std::log(r.T), step = std::log(8.0);
    for (double u = 0.0; u < U; u += step) add_panel(r, u, std::min(u + step, U), true, order);
  }
  return r;
}

// Which time integral applies, and whether the input must be split.
enum class SemigroupCase { zero, direct, split };

SemigroupCase classify(const Function& f) {
  const FunctionTraits& tr = f.traits();
  if (tr.constant_value) return SemigroupCase::zero;
  const std::size_t n = f.dim();
  const bool periodic = tr.wavevector.has_value();
  const bool decaying = finite_box(tr, n) && tr.heat_limit && *tr.heat_limit == 0.0;
  if (periodic && tr.heat_limit) return SemigroupCase::direct;
  if (decaying) return SemigroupCase::direct;
  if (!f.terms().empty()) return SemigroupCase::split;
  throw Error(ErrorKind::TailDivergence,
              f.name() + ": no large-time limit of the heat semigroup, the time integral diverges");
}

std::vector<PointValue> semigroup_direct(const Function& f, const HeatOperator& op, const TimeRule& rule,
                                         std::span<const double> x, std::span<const FracOrder> s) {
  std::vector<double> H(rule.t.size());
  for (std::size_t k = 0; k < H.size(); ++k) H[k] = op(x, rule.t[k], false).h;
  const double f0 = f.value(x), lap0 = f.laplacian(x);
  const double n = static_cast<double>(rule.n);
  std::vector<PointValue> out(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double a = s[j].value();
    Estimate e;
    for (std::size_t p = 0; p < rule.panels.size(); ++p) {
      const TimePanel& P = rule.panels[p];
      const std::size_t hi_end = P.lo_begin;
      const std::size_t lo_end = p + 1 < rule.panels.size() ? rule.panels[p + 1].hi_begin : rule.t.size();
      auto integrand = [&](std::size_t k) {
        const double t = rule.t[k];
        if (P.log) return (H[k] - rule.L) * std::pow(t, -a);
        return (H[k] - f0 - t * lap0) * std::pow(t, -1.0 - a);
      };
      double g16 = 0.0, g8 = 0.0;
      for (std::size_t k = P.hi_begin; k < hi_end; ++k) g16 += rule.w[k] * integrand(k);
      for (std::size_t k = P.lo_begin; k < lo_end; ++k) g8 += rule.w[k] * integrand(k);
      e.value += g16;
      e.error += std::abs(g16 - g8);
    }
    e.value += lap0 / (1.0 - a) + (rule.L - f0) / a;
    if (rule.mass && rule.T > 1.0)
      e.value += *rule.mass * std::pow(4.0 * std::numbers::pi, -0.5 * n) * std::pow(rule.T, -0.5 * n - a) /
                 (0.5 * n + a);
    const double c = s[j].inv_gamma_neg();
    out[j] = {c * e.value, std::abs(c) * e.error};
  }
  return out;
}

// Memoized pieces per function; terms of a sum get their own.
struct SemigroupPlan {
  SemigroupCase kind = SemigroupCase::zero;
  std::unique_ptr<HeatOperator> op;
  TimeRule rule;
  std::vector<std::pair<double, std::unique_ptr<SemigroupPlan>>> parts;
  const Function* f = nullptr;
};

std::unique_ptr<SemigroupPlan> plan_semigroup(const Function& f, const QuadratureSpec& quad) {
  auto p = std::make_unique<SemigroupPlan>();
  p->f = &f;
  p->kind = classify(f);
  if (p->kind == SemigroupCase::direct) {
    p->op = std::make_unique<HeatOperator>(f);
    p->rule = time_rule(f, *p->op, quad);
  } else if (p->kind == SemigroupCase::split) {
    for (const auto& [c, g] : f.terms())
      if (c != 0.0) p->parts.emplace_back(c, plan_semigroup(*g, quad));
  }
  return p;
}

std::vector<PointValue> run_semigroup(const SemigroupPlan& p, std::span<const double> x,
                                      std::span<const FracOrder> s) {
  switch (p.kind) {
    case SemigroupCase::zero: return std::vector<PointValue>(s.size());
    case SemigroupCase::direct: return semigroup_direct(*p.f, *p.op, p.rule, x, s);
    case SemigroupCase::split: break;
  }
  std::vector<PointValue> out(s.size());
  for (const auto& [c, part] : p.parts) {
    const auto v = run_semigroup(*part, x, s);
    for (std::size_t j = 0; j < s.size(); ++j) {
      out[j].value += c * v[j].value;
      out[j].error += std::abs(c) * v[j].error;
    }
  }
  return out;
}

// ---- principal value ------------------------------------------------------

struct Direction {
  std::vector<double> w;
  double weight;
};

std::vector<Direction> half_sphere(std::size_t n, std::size_t nodes) {
  std::vector<Direction> d;
  const double pi = std::numbers::pi;
  if (n == 1) return {{{1.0}, 1.0}};
  if (n == 2) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const double th = pi * static_cast<double>(j) / static_cast<double>(nodes);
      d.push_back({{std::cos(th), std::sin(th)}, pi / static_cast<double>(nodes)});
    }
    return d;
  }
  // u = cos(polar) in [0, 1] by Gauss-Legendre, azimuth by the trapezoid rule
  const std::size_t nphi = std::max<std::size_t>(4, nodes / 2), nu = std::max<std::size_t>(2, nodes / 4);
  const Rule& gl = gauss_legendre(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    const double u = 0.5 * (1.0 + gl.nodes[i]), wu = 0.5 * gl.weights[i];
    const double sn = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (std::size_t j = 0; j < nphi; ++j) {
      const double phi = 2.0 * pi * static_cast<double>(j) / static_cast<double>(nphi);
      d.push_back({{sn * std::cos(phi), sn * std::sin(phi), u}, wu * 2.0 * pi / static_cast<double>(nphi)});
    }
  }
  return d;
}

// Plane waves: the directional integral behaves like |k.w|^{2s}, so the
// nodes are graded toward the directions orthogonal to k.
constexpr std::size_t kAngularLevels = 26;

std::vector<Direction> half_sphere_wave(std::span<const double> k, std::size_t nodes) {
  const std::size_t n = k.size();
  const double pi = std::numbers::pi;
  double kn = 0.0;
  for (double v : k) kn += v * v;
  kn = std::sqrt(kn);
  const Rule& gl = gauss_legendre(8);
  // offsets v in (0, 1] from the singular set, graded dyadically toward 0
  std::vector<std::pair<double, double>> graded;
  double hi = 1.0;
  for (std::size_t l = 0; l < kAngularLevels; ++l) {
    const double lo = 0.5 * hi, half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < gl.size(); ++i) graded.emplace_back(mid + half * gl.nodes[i], half * gl.weights[i]);
    hi = lo;
  }
  std::vector<Direction> d;
  if (n == 2) {
    // theta in [ts, ts + pi), ts orthogonal to k; split at the middle (parallel to k)
    const double ts = std::atan2(k[1], k[0]) + 0.5 * pi;
    for (const auto& [v, w] : graded)
      for (double th : {ts + 0.5 * pi * v, ts + pi - 0.5 * pi * v})
        d.push_back({{std::cos(th), std::sin(th)}, 0.5 * pi * w});
    return d;
  }
  // frame with e3 along k; u = w.e3 graded toward the equator u = 0
  const std::vector<double> e3{k[0] / kn, k[1] / kn, k[2] / kn};
  std::vector<double> e1 = std::abs(e3[0]) < 0.9 ? std::vector<double>{1, 0, 0} : std::vector<double>{0, 1, 0};
  double dot = e1[0] * e3[0] + e1[1] * e3[1] + e1[2] * e3[2];
  for (int i = 0; i < 3; ++i) e1[i] -= dot * e3[i];
  const double e1n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (double& v : e1) v /= e1n;
  const std::vector<double> e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2],
                               e3[0] * e1[1] - e3[1] * e1[0]};
  const std::size_t nphi = std::max<std::size_t>(4, nodes / 2);
  for (const auto& [u, wu] : graded) {
    const double sn = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (std::size_t j = 0; j < nphi; ++j) {
      const double phi = 2.0 * pi * static_cast<double>(j) / static_cast<double>(nphi);
      const double c = sn * std::cos(phi), sv = sn * std::sin(phi);
      d.push_back({{c * e1[0] + sv * e2[0] + u * e3[0], c * e1[1] + sv * e2[1] + u * e3[1],
                    c * e1[2] + sv * e2[2] + u * e3[2]},
                   wu * 2.0 * pi / static_cast<double>(nphi)});
    }
  }
  return d;
}

std::vector<Direction> directions(const Function& f, const QuadratureSpec& quad) {
  const auto& wv = f.traits().wavevector;
  if (f.dim() > 1 && wv) return half_sphere_wave(*wv, quad.angular_nodes);
  return half_sphere(f.dim(), quad.angular_nodes);
}

// g(r) = f(x + r w) + f(x - r w), memoized.
class SymRay {
 public:
  SymRay(const Function& f, std::span<const double> x, std::span<const double> w)
      : f_(f), x_(x.begin(), x.end()), w_(w.begin(), w.end()), y_(x.size()) {}
  double operator()(double r) const {
    auto it = memo_.find(r);
    if (it != memo_.end()) return it->second;
    const double v = eval(r) + eval(-r);
    memo_.emplace(r, v);
    return v;
  }

 private:
  double eval(double r) const {
    for (std::size_t i = 0; i < x_.size(); ++i) y_[i] = x_[i] + r * w_[i];
    return f_.value(y_);
  }
  const Function& f_;
  std::vector<double> x_, w_;
  mutable std::vector<double> y_;
  mutable std::unordered_map<double, double> memo_;
};

// Feature length of f along direction w.
double ray_scale(const FunctionTraits& tr, std::span<const double> w) {
  double s = kInf;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double l = axis_scale(tr, i);
    if (std::abs(w[i]) > 1e-14 && std::isfinite(l)) s = std::min(s, l / std::abs(w[i]));
  }
  return std::isfinite(s) ? s : feature(tr);
}

// Radii r > 0 where x + sigma r w enters or leaves the support (box, and the
// inscribed ball of compactly supported nD data), plus 1D breakpoints.
std::vector<double> sym_breaks(const Function& f, std::span<const double> x, std::span<const double> w,
                               double* reach) {
  const FunctionTraits& tr = f.traits();
  const std::size_t n = x.size();
  std::vector<double> br;
  *reach = kInf;
  if (!finite_box(tr, n)) return br;
  double far = 0.0;
  for (double sigma : {1.0, -1.0}) {
    double rin = 0.0, rout = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = sigma * w[i];
      const double lo = tr.support_lo[i] - x[i], hi = tr.support_hi[i] - x[i];
      if (std::abs(d) < 1e-15) {
        if (lo > 0.0 || hi < 0.0) rout = -1.0;
        continue;
      }
      const double r1 = lo / d, r2 = hi / d;
      rin = std::max(rin, std::min(r1, r2));
      rout = std::min(rout, std::max(r1, r2));
    }
    if (rout > rin) {
      far = std::max(far, rout);
      if (rin > 0.0) br.push_back(rin);
      br.push_back(rout);
    }
    if (n > 1 && tr.decay == DecayClass::compact_support) {
      // |x + sigma r w - c|^2 = R^2
      const double R = 0.5 * (tr.support_hi[0] - tr.support_lo[0]);
      double b = 0.0, c = -R * R;
      for (std::size_t i = 0; i < n; ++i) {
        const double ci = 0.5 * (tr.support_lo[i] + tr.support_hi[i]);
        b += sigma * w[i] * (x[i] - ci);
        c += (x[i] - ci) * (x[i] - ci);
      }
      const double disc = b * b - c;
      if (disc > 0.0) {
        for (double r : {-b - std::sqrt(disc), -b + std::sqrt(disc)})
          if (r > 0.0) br.push_back(r);
      }
    }
  }
  if (n == 1)
    for (double b : tr.breakpoints) {
      const double r = std::abs(b - x[0]);
      if (r > 0.0) br.push_back(r);
    }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  *reach = far;
  return br;
}

detail::RayInfo sym_ray_info(const Function& f, std::span<const double> x, std::span<const double> w, double start,
                             const QuadratureSpec& quad) {
  const FunctionTraits& tr = f.traits();
  detail::RayInfo info;
  info.scale = ray_scale(tr, w);
  double reach;
  for (double b : sym_breaks(f, x, w, &reach))
    if (b > start) info.breaks.push_back(b);
  if (tr.constant_value) {
    info.constant = 2.0 * *tr.constant_value;
  } else if (std::isfinite(reach)) {
    info.reach = reach;
  } else if (tr.decay == DecayClass::exponential_left || !std::isfinite(tr.sup_abs)) {
    // constant along directions orthogonal to the growth axis
    if (std::abs(w[0]) > 1e-14)
      throw Error(ErrorKind::TailDivergence, f.name() + ": grows along this direction, the tail diverges");
    info.constant = 2.0 * f.value(x);
  } else if (tr.wavevector) {
    double kw = 0.0, k2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      kw += (*tr.wavevector)[i] * w[i];
      k2 += (*tr.wavevector)[i] * (*tr.wavevector)[i];
    }
    if (std::abs(kw) <= 1e-12 * std::sqrt(k2)) {
      info.constant = 2.0 * f.value(x);
    } else {
      info.period = 2.0 * std::numbers::pi / std::abs(kw);
      info.scale = std::min(info.scale, 1.0 / std::abs(kw));
    }
  } else {
    info.bound = 2.0 * tr.sup_abs;
    info.truncation = quad.tail_radius.value_or(1e4 * info.scale);
  }
  return info;
}

// integral_a^inf cos(kappa r) r^{-beta} dr, beta > 1, via rho = kappa r.
Estimate cos_tail(double kappa, double a, double beta, const QuadratureSpec& quad) {
  const double c = kappa * a;
  detail::RayInfo info;
  info.period = 2.0 * std::numbers::pi;
  auto cosf = [](double rho) { return std::cos(rho); };
  Estimate e;
  if (c >= 1.0) {
    e = detail::ray_tail(cosf, c, beta, info, quad.n_tail);
  } else {
    // integral_c^1 (cos - 1) rho^{-beta} + integral_c^1 rho^{-beta} + integral_1^inf cos rho^{-beta}
    auto g = [&](double rho) {
      const double sh = std::sin(0.5 * rho);
      return -2.0 * sh * sh * std::pow(rho, -beta);
    };
    std::vector<double> br;
    for (double r = 0.5; r > c; r *= 0.5) br.push_back(r);
    std::sort(br.begin(), br.end());
    e = detail::panels(g, c, 1.0, quad.n_tail, 1.0, br);
    e.value += (std::pow(c, 1.0 - beta) - 1.0) / (beta - 1.0);
    e += detail::ray_tail(cosf, 1.0, beta, info, quad.n_tail);
  }
  const double scale = std::pow(kappa, beta - 1.0);
  return {scale * e.value, scale * e.error};
}

// integral_a^inf g(r) r^{-beta} dr, splitting sums without a usable description.
Estimate sym_tail(const Function& f, std::span<const double> x, std::span<const double> w, double a, double beta,
                  const QuadratureSpec& quad, const SymRay* ray) {
  const FunctionTraits& tr = f.traits();
  if (!tr.constant_value && !finite_box(tr, x.size()) && !tr.wavevector) {
    const auto terms = f.terms();
    if (!terms.empty()) {
      Estimate e;
      for (const auto& [c, g] : terms) {
        if (c == 0.0) continue;
        const Estimate p = sym_tail(*g, x, w, a, beta, quad, nullptr);
        e.value += c * p.value;
        e.error += std::abs(c) * p.error;
      }
      return e;
    }
  }
  if (tr.wavevector && !tr.constant_value) {
    // g(r) = 2 f(x) cos(r k.w) exactly
    double kw = 0.0, k2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      kw += (*tr.wavevector)[i] * w[i];
      k2 += (*tr.wavevector)[i] * (*tr.wavevector)[i];
    }
    const double f2 = 2.0 * f.value(x);
    if (std::abs(kw) <= 1e-12 * std::sqrt(k2)) return {f2 * std::pow(a, 1.0 - beta) / (beta - 1.0), 0.0};
    const Estimate e = cos_tail(std::abs(kw), a, beta, quad);
    return {f2 * e.value, std::abs(f2) * e.error};
  }
  const auto info = sym_ray_info(f, x, w, a, quad);
  if (ray) return detail::ray_tail([&](double r) { return (*ray)(r); }, a, beta, info, quad.n_tail);
  const SymRay own(f, x, w);
  return detail::ray_tail([&](double r) { return own(r); }, a, beta, info, quad.n_tail);
}

double quad_form(const std::vector<double>& H, std::span<const double> w) {
  const std::size_t n = w.size();
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q += w[i] * H[i * n + j] * w[j];
  return q;
}

std::vector<double> inner_breaks(const Function& f, std::span<const double> x, std::span<const double> w,
                                 double upto) {
  double reach;
  std::vector<double> out;
  for (double b : sym_breaks(f, x, w, &reach))
    if (b < upto) out.push_back(b);
  return out;
}

void check_dims(const Function& f, std::span<const double> x) {
  if (x.size() != f.dim()) throw Error(ErrorKind::GridMismatch, "point dimension differs from the function's");
  if (f.dim() < 1 || f.dim() > 3) throw Error(ErrorKind::ParameterOutOfRange, "dimension must be 1, 2 or 3");
}

double cns_of(const FracOrder& s, std::size_t n) { return cns(static_cast<int>(n), s.value()); }

// ---- grid plumbing -------------------------------------------------------

std::vector<std::size_t> lap_points(const GridND& g, std::optional<Window> w) { return detail::window_points(g, w); }

std::vector<double> coords(const GridND& g, const std::vector<std::size_t>& idx) {
  const std::size_t n = g.dim();
  std::vector<double> p(idx.size() * n);
  for (std::size_t k = 0; k < idx.size(); ++k) g.point(idx[k], std::span<double>(p.data() + k * n, n));
  return p;
}

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// Laplacian of f as a function (values only are needed by the heat operator).
class LaplacianOf final : public Function {
 public:
  explicit LaplacianOf(FunctionPtr f) : f_(std::move(f)) {
    t_ = f_->traits();
    if (t_.total_mass) t_.total_mass = 0.0;
    if (t_.constant_value) t_.constant_value = 0.0;
    if (t_.heat_limit) t_.heat_limit = 0.0;
    t_.sup_abs = kInf;
  }
  std::size_t dim() const override { return f_->dim(); }
  double value(std::span<const double> x) const override { return f_->laplacian(x); }
  void gradient(std::span<const double>, std::span<double>) const override {
    throw Error(ErrorKind::ParameterOutOfRange, "gradient of a Laplacian is not available");
  }
  void hessian(std::span<const double>, std::span<double>) const override {
    throw Error(ErrorKind::ParameterOutOfRange, "Hessian of a Laplacian is not available");
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override { return "laplacian(" + f_->name() + ")"; }

 private:
  FunctionPtr f_;
  FunctionTraits t_;
};

// |D^2 f| (Frobenius) as a function.
class HessianNorm final : public Function {
 public:
  explicit HessianNorm(FunctionPtr f) : f_(std::move(f)) {
    t_ = f_->traits();
    t_.total_mass.reset();
    if (t_.constant_value) t_.constant_value = 0.0;
    t_.sup_abs = kInf;
    t_.heat_limit.reset();
    t_.wavevector.reset();  // |cos|, not a plane wave
  }
  std::size_t dim() const override { return f_->dim(); }
  double value(std::span<const double> x) const override { return f_->hessian_norm(x); }
  void gradient(std::span<const double>, std::span<double>) const override {
    throw Error(ErrorKind::ParameterOutOfRange, "gradient of |D^2 f| is not available");
  }
  void hessian(std::span<const double>, std::span<double>) const override {
    throw Error(ErrorKind::ParameterOutOfRange, "Hessian of |D^2 f| is not available");
  }
  const FunctionTraits& traits() const override { return t_; }
  std::string name() const override { return "hessian_norm(" + f_->name() + ")"; }

 private:
  FunctionPtr f_;
  FunctionTraits t_;
};

}  // namespace

const char* to_string(LapMethod m) {
  switch (m) {
    case LapMethod::semigroup: return "semigroup";
    case LapMethod::pv: return "pv";
    case LapMethod::spectral: return "spectral";
  }
  return "?";
}

LapMethod parse_lap_method(const std::string& s) {
  if (s == "semigroup") return LapMethod::semigroup;
  if (s == "pv") return LapMethod::pv;
  if (s == "spectral") return LapMethod::spectral;
  throw Error(ErrorKind::ParameterOutOfRange, "unknown method '" + s + "' (semigroup, pv, spectral)");
}

double heat_at(const Function& f, std::span<const double> x, double t) {
  check_dims(f, x);
  if (!(t > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "heat time must be > 0");
  if (const auto& c = f.traits().constant_value) return *c;
  return HeatOperator(f)(x, t, false).h;
}

HeatEvaluation heat_semigroup(const SampledFunctionND& f, double t, const QuadratureSpec& quad,
                              std::optional<Window> window) {
  quad.validate();
  if (!(t > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "heat time must be > 0");
  const FunctionPtr ev = f.require_closed_form("heat_semigroup");
  const std::size_t n = f.dim();
  const auto idx = lap_points(f.grid, window);
  HeatEvaluation r;
  r.t = t;
  r.dim = n;
  r.points = coords(f.grid, idx);
  r.values.resize(idx.size());
  const auto& c = ev->traits().constant_value;
  const HeatOperator op(*ev);
  for_each_index(quad.exec, idx.size(), [&](std::size_t k) {
    const std::span<const double> x(r.points.data() + k * n, n);
    r.values[k] = c ? *c : op(x, t, false).h;
  });
  r.kernel_truncation_radius = c ? 0.0 : op.radius(t);
  return r;
}

std::vector<PointValue> frac_laplacian_semigroup_at(const Function& f, std::span<const double> x,
                                                    std::span<const FracOrder> s, const QuadratureSpec& quad) {
  quad.validate();
  check_dims(f, x);
  const auto plan = plan_semigroup(f, quad);
  auto out = run_semigroup(*plan, x, s);
  for (const auto& v : out) check_converged(v, quad, "semigroup time integral");
  return out;
}

std::vector<PointValue> frac_laplacian_pv_at(const Function& f, std::span<const double> x,
                                             std::span<const FracOrder> s, const QuadratureSpec& quad) {
  quad.validate();
  check_dims(f, x);
  const std::size_t n = x.size();
  std::vector<PointValue> out(s.size());
  const FunctionTraits& tr = f.traits();
  if (tr.constant_value) return out;
  const double f0 = f.value(x);
  std::vector<double> H(n * n);
  f.hessian(x, H);
  for (const Direction& d : directions(f, quad)) {
    const SymRay g(f, x, d.w);
    const double q = quad_form(H, d.w);
    const auto br = inner_breaks(f, x, d.w, 1.0);
    const double width = 0.5 * ray_scale(tr, d.w);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double a = s[j].value();
      auto integrand = [&](double r) { return (2.0 * f0 - g(r) + r * r * q) * std::pow(r, -1.0 - 2.0 * a); };
      const Estimate in = detail::graded(integrand, 1.0, quad.pv_levels, quad.n_singular, br, width);
      const Estimate tail = sym_tail(f, x, d.w, 1.0, 1.0 + 2.0 * a, quad, &g);
      out[j].value += d.weight * (in.value - q / (2.0 - 2.0 * a) + f0 / a - tail.value);
      out[j].error += d.weight * (in.error + tail.error);
    }
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double c = cns_of(s[j], n);
    out[j].value *= c;
    out[j].error *= c;
    check_converged(out[j], quad, "principal value");
  }
  return out;
}

namespace {

// 1 - mean of cos(rho w_1) over the unit sphere in R^n
double one_minus_sphere_mean(std::size_t n, double rho) {
  const double nu = 0.5 * static_cast<double>(n);
  if (rho < 1.0) {
    // power series, no cancellation
    double term = 1.0, sum = 0.0;
    const double q = 0.25 * rho * rho;
    for (int j = 1; j <= 14; ++j) {
      term *= -q / (j * (nu + j - 1.0));
      sum -= term;
    }
    return sum;
  }
  return 1.0 - std::tgamma(nu) * std::pow(2.0 / rho, nu - 1.0) * std::cyl_bessel_j(nu - 1.0, rho);
}

// Plane wave A cos(k.x + phase): T_{s,eps} f(x) = f(x) kappa^{2s} (1 - c |S| J(kappa eps)),
// J(b) = integral_0^b (1 - sphere mean) rho^{-1-2s} drho.
Estimate plane_wave_core(std::size_t n, double s, double b, std::size_t order) {
  auto g = [&](double rho) { return one_minus_sphere_mean(n, rho) * std::pow(rho, -1.0 - 2.0 * s); };
  const double top = std::min(b, 1.0);
  constexpr std::size_t levels = 30;
  Estimate e = detail::graded(g, top, levels, order, {}, top);
  const double delta = std::ldexp(top, -static_cast<int>(levels));
  e.value += std::pow(delta, 2.0 - 2.0 * s) / ((2.0 - 2.0 * s) * 2.0 * static_cast<double>(n));
  if (b > 1.0) e += detail::panels(g, 1.0, b, order, 0.5, {});
  return e;
}

}  // namespace

std::vector<PointValue> truncated_Ts_eps_at(const Function& f, std::span<const double> x,
                                            std::span<const FracOrder> s, std::span<const double> eps,
                                            const QuadratureSpec& quad) {
  quad.validate();
  check_dims(f, x);
  for (double e : eps)
    if (!(e > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "eps must be > 0");
  const std::size_t n = x.size();
  std::vector<PointValue> out(s.size() * eps.size());
  const FunctionTraits& tr = f.traits();
  if (tr.constant_value) return out;
  const double f0 = f.value(x);
  if (n >= 2 && tr.wavevector && tr.wavevector->size() == n) {
    double k2 = 0.0;
    for (double c : *tr.wavevector) k2 += c * c;
    const double kappa = std::sqrt(k2);
    if (kappa > 0.0) {
      const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double a = s[j].value(), c = cns_of(s[j], n);
        for (std::size_t k = 0; k < eps.size(); ++k) {
          const Estimate J = plane_wave_core(n, a, kappa * eps[k], quad.n_singular);
          const double scale = std::abs(f0) * std::pow(kappa, 2.0 * a) * c * area;
          PointValue& o = out[j * eps.size() + k];
          o.value = f0 * std::pow(kappa, 2.0 * a) * (1.0 - c * area * J.value);
          o.error = scale * J.error;
          check_converged(o, quad, "truncated operator");
        }
      }
      return out;
    }
  }
  double emin = 1.0;
  for (double e : eps) emin = std::min(emin, e);
  for (const Direction& d : directions(f, quad)) {
    const SymRay g(f, x, d.w);
    auto br = inner_breaks(f, x, d.w, 1.0);
    for (double r = 0.5; r > 0.5 * emin; r *= 0.5) br.push_back(r);
    for (double e : eps)
      if (e < 1.0) br.push_back(e);
    std::sort(br.begin(), br.end());
    const double width = 0.5 * ray_scale(tr, d.w);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double a = s[j].value();
      auto integrand = [&](double r) { return (2.0 * f0 - g(r)) * std::pow(r, -1.0 - 2.0 * a); };
      Estimate tail1;
      bool have_tail1 = false;
      for (std::size_t k = 0; k < eps.size(); ++k) {
        const double e = eps[k];
        Estimate v;
        if (e < 1.0) {
          if (!have_tail1) {
            tail1 = sym_tail(f, x, d.w, 1.0, 1.0 + 2.0 * a, quad, &g);
            have_tail1 = true;
          }
          v = detail::panels(integrand, e, 1.0, quad.n_singular, width, br);
          v.value += f0 / a - tail1.value;
          v.error += tail1.error;
        } else {
          const Estimate tail = sym_tail(f, x, d.w, e, 1.0 + 2.0 * a, quad, &g);
          v.value = f0 * std::pow(e, -2.0 * a) / a - tail.value;
          v.error = tail.error;
        }
        PointValue& o = out[j * eps.size() + k];
        o.value += d.weight * v.value;
        o.error += d.weight * v.error;
      }
    }
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double c = cns_of(s[j], n);
    for (std::size_t k = 0; k < eps.size(); ++k) {
      PointValue& o = out[j * eps.size() + k];
      o.value *= c;
      o.error *= c;
      check_converged(o, quad, "truncated operator");
    }
  }
  return out;
}

std::vector<FracLapResult> frac_laplacian(const SampledFunctionND& f, std::span<const FracOrder> s, LapMethod method,
                                          const QuadratureSpec& quad, std::optional<Window> window) {
  quad.validate();
  if (s.empty()) throw Error(ErrorKind::ParameterOutOfRange, "empty order list");
  const std::size_t n = f.dim();
  const auto idx = lap_points(f.grid, window);
  std::vector<FracLapResult> res;
  for (const FracOrder& o : s) {
    FracLapResult r{n, coords(f.grid, idx), std::vector<double>(idx.size()), std::vector<double>(idx.size()), o,
                    method};
    res.push_back(std::move(r));
  }
  if (method == LapMethod::spectral) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      const FracLapResult full = spectral_fraclap(f, s[j]);
      for (std::size_t k = 0; k < idx.size(); ++k) res[j].values[k] = full.values[idx[k]];
    }
    return res;
  }
  const FunctionPtr ev = f.require_closed_form("frac_laplacian");
  std::unique_ptr<SemigroupPlan> plan;
  if (method == LapMethod::semigroup) plan = plan_semigroup(*ev, quad);
  const auto& pts = res[0].points;
  for_each_index(quad.exec, idx.size(), [&](std::size_t k) {
    const std::span<const double> x(pts.data() + k * n, n);
    std::vector<PointValue> v;
    if (method == LapMethod::semigroup) {
      v = run_semigroup(*plan, x, s);
      for (const auto& pv : v) check_converged(pv, quad, "semigroup time integral");
    } else {
      v = frac_laplacian_pv_at(*ev, x, s, quad);
    }
    for (std::size_t j = 0; j < s.size(); ++j) {
      res[j].values[k] = v[j].value;
      res[j].error[k] = v[j].error;
    }
  });
  return res;
}

FracLapResult frac_laplacian_semigroup(const SampledFunctionND& f, const FracOrder& s, const QuadratureSpec& quad,
                                       std::optional<Window> window) {
  return std::move(frac_laplacian(f, std::span<const FracOrder>(&s, 1), LapMethod::semigroup, quad, window)[0]);
}

FracLapResult frac_laplacian_pv(const SampledFunctionND& f, const FracOrder& s, const QuadratureSpec& quad,
                                std::optional<Window> window) {
  return std::move(frac_laplacian(f, std::span<const FracOrder>(&s, 1), LapMethod::pv, quad, window)[0]);
}

FracLapResult truncated_Ts_eps(const SampledFunctionND& f, const FracOrder& s, double eps, const QuadratureSpec& quad,
                               std::optional<Window> window) {
  quad.validate();
  const FunctionPtr ev = f.require_closed_form("truncated_Ts_eps");
  const std::size_t n = f.dim();
  const auto idx = lap_points(f.grid, window);
  FracLapResult r{n, coords(f.grid, idx), std::vector<double>(idx.size()), std::vector<double>(idx.size()), s,
                  LapMethod::pv};
  for_each_index(quad.exec, idx.size(), [&](std::size_t k) {
    const std::span<const double> x(r.points.data() + k * n, n);
    const auto v = truncated_Ts_eps_at(*ev, x, std::span<const FracOrder>(&s, 1), std::span<const double>(&eps, 1),
                                       quad);
    r.values[k] = v[0].value;
    r.error[k] = v[0].error;
  });
  return r;
}

FracLapResult spectral_fraclap(const SampledFunctionND& f, const FracOrder& s) {
  const std::size_t n = f.dim();
  const GridND& g = f.grid;
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  std::vector<std::size_t> N(n);
  std::vector<double> L(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.axis(i).size() < 3) throw Error(ErrorKind::NonPeriodicInput, "too few samples along an axis");
    N[i] = g.axis(i).size() - 1;
    L[i] = g.axis(i).t_max() - g.axis(i).t_min();
  }
  // periodicity: value at the last node of each axis equals the first
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    auto id = g.unflatten(flat);
    for (std::size_t i = 0; i < n; ++i) {
      if (id[i] + 1 != g.axis(i).size()) continue;
      auto wrapped = id;
      wrapped[i] = 0;
      if (std::abs(f.values[flat] - f.values[g.flatten(wrapped)]) > 1e-9 * std::max(1.0, m))
        throw Error(ErrorKind::NonPeriodicInput, "samples are not periodic along axis " + std::to_string(i + 1));
    }
  }
  const std::size_t total = product(N);
  std::vector<double> in(total);
  {
    std::vector<std::size_t> id(n, 0);
    for (std::size_t k = 0; k < total; ++k) {
      in[k] = f.values[g.flatten(id)];
      for (std::size_t i = n; i-- > 0;) {
        if (++id[i] < N[i]) break;
        id[i] = 0;
      }
    }
  }
  std::vector<std::size_t> cN = N;
  cN.back() = N.back() / 2 + 1;
  std::vector<std::complex<double>> spec(product(cN));
  std::vector<int> dims(N.begin(), N.end());
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd = fftw_plan_dft_r2c(static_cast<int>(n), dims.data(), in.data(),
                            reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r(static_cast<int>(n), dims.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                            in.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  const double a = s.value();
  {
    std::vector<std::size_t> id(n, 0);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      double xi2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double m_i = static_cast<double>(id[i]);
        if (i + 1 < n && id[i] > N[i] / 2) m_i -= static_cast<double>(N[i]);
        const double xi = 2.0 * std::numbers::pi * m_i / L[i];
        xi2 += xi * xi;
      }
      spec[k] *= (xi2 > 0.0 ? std::pow(xi2, a) : 0.0) / static_cast<double>(total);
      for (std::size_t i = n; i-- > 0;) {
        if (++id[i] < cN[i]) break;
        id[i] = 0;
      }
    }
  }
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  FracLapResult r{n, std::vector<double>(g.size() * n), std::vector<double>(g.size()),
                  std::vector<double>(g.size(), 0.0), s, LapMethod::spectral};
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    auto id = g.unflatten(flat);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) k = k * N[i] + (id[i] % N[i]);
    r.values[flat] = in[k];
    g.point(flat, std::span<double>(r.points.data() + flat * n, n));
  }
  return r;
}

SweepReport laplacian_limit_sweep(const SampledFunctionND& f, std::span<const double> s_values, double p,
                                  const Weight& w, const QuadratureSpec& quad, std::optional<Window> window,
                                  LapMethod method) {
  quad.validate();
  if (s_values.empty()) throw Error(ErrorKind::ParameterOutOfRange, "empty order list");
  const std::size_t n = f.dim();
  std::vector<FracOrder> orders;
  for (double v : s_values) orders.push_back(FracOrder::s(v, static_cast<int>(n)));
  const FunctionPtr ev = f.require_closed_form("laplacian_limit_sweep");
  const auto res = frac_laplacian(f, orders, method, quad, window);
  const auto idx = lap_points(f.grid, window);
  Window win = window.value_or(Window{kInf, -kInf});
  if (!window)
    for (std::size_t i = 0; i < n; ++i) {
      win.lo = std::min(win.lo, f.grid.axis(i).t_min());
      win.hi = std::max(win.hi, f.grid.axis(i).t_max());
    }
  const SampledWeight sw = sample_weight(w, f.grid);
  std::vector<double> fv(idx.size()), lv(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::span<const double> x(res[0].points.data() + k * n, n);
    fv[k] = ev->value(x);
    lv[k] = ev->laplacian(x);
  }
  SweepReport rep;
  for (std::size_t j = 0; j < orders.size(); ++j) {
    std::vector<double> e_lap(f.grid.size(), 0.0), e_fun(f.grid.size(), 0.0), est(f.grid.size(), 0.0);
    double sup_lap = 0.0, sup_fun = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double v = res[j].values[k];
      e_lap[idx[k]] = v + lv[k];
      e_fun[idx[k]] = v - fv[k];
      est[idx[k]] = res[j].error[k];
      sup_lap = std::max(sup_lap, std::abs(e_lap[idx[k]]));
      sup_fun = std::max(sup_fun, std::abs(e_fun[idx[k]]));
    }
    const double err = weighted_lp_norm(sw.grid, est, sw.values, p, win);
    const double sv = s_values[j];
    rep.rows.push_back({sv, "lp_error_to_laplacian", weighted_lp_norm(sw.grid, e_lap, sw.values, p, win), err});
    rep.rows.push_back({sv, "lp_error_to_function", weighted_lp_norm(sw.grid, e_fun, sw.values, p, win), err});
    rep.rows.push_back({sv, "sup_error_to_laplacian", sup_lap, 0.0});
    rep.rows.push_back({sv, "sup_error_to_function", sup_fun, 0.0});
  }
  rep.sort_rows();
  return rep;
}

bool SuiteReport::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const SuiteItem& i) { return i.passed; });
}

SuiteReport semigroup_property_suite(const SampledFunctionND& f, const Weight& w, double p,
                                     const QuadratureSpec& quad, std::optional<Window> window) {
  quad.validate();
  const FunctionPtr ev = f.require_closed_form("semigroup_property_suite");
  const std::size_t n = f.dim();
  const FunctionTraits& tr = ev->traits();
  const auto idx = lap_points(f.grid, window);
  const auto pts = coords(f.grid, idx);
  const std::size_t np = idx.size();
  auto point = [&](std::size_t k) { return std::span<const double>(pts.data() + k * n, n); };
  // expensive pointwise checks run on at most 256 evenly strided nodes
  std::vector<std::size_t> sub;
  const std::size_t stride = std::max<std::size_t>(1, (np + 255) / 256);
  for (std::size_t k = 0; k < np; k += stride) sub.push_back(k);

  Window win = window.value_or(Window{kInf, -kInf});
  if (!window)
    for (std::size_t i = 0; i < n; ++i) {
      win.lo = std::min(win.lo, f.grid.axis(i).t_min());
      win.hi = std::max(win.hi, f.grid.axis(i).t_max());
    }
  const SampledWeight sw = sample_weight(w, f.grid);
  auto norm = [&](const std::vector<double>& v) {
    std::vector<double> full(f.grid.size(), 0.0);
    for (std::size_t k = 0; k < np; ++k) full[idx[k]] = v[k];
    return weighted_lp_norm(f.grid, full, sw.values, p, win);
  };

  const HeatOperator op(*ev);
  const auto& cval = tr.constant_value;
  auto heat = [&](std::span<const double> x, double t, bool lap) {
    if (cval) return HeatOperator::Value{*cval, 0.0};
    return op(x, t, lap);
  };
  std::vector<double> f0(np);
  for (std::size_t k = 0; k < np; ++k) f0[k] = ev->value(point(k));
  double supf = 0.0;
  for (double v : f0) supf = std::max(supf, std::abs(v));

  SuiteReport rep;
  const double ell = feature(tr);

  {  // 1
    const std::vector<double> ts{1.0 / 16, 0.25, 1.0, 4.0};
    const ScaleLattice lat = dense_lattice(ell / 64.0, 256.0 * std::max(ell, 1.0));
    std::vector<double> excess(sub.size()), mf(sub.size());
    for_each_index(quad.exec, sub.size(), [&](std::size_t q) {
      const auto x = point(sub[q]);
      mf[q] = m_hl_at(*ev, x, lat);
      double e = -kInf;
      for (double t : ts) e = std::max(e, std::abs(heat(x, t, false).h) - mf[q]);
      excess[q] = e;
    });
    const double worst = *std::max_element(excess.begin(), excess.end());
    const double tol = quad.tolerance * (1.0 + *std::max_element(mf.begin(), mf.end()));
    rep.items.push_back({"1", "sup_t |e^{t Lap} f| <= M f", worst, tol, worst <= tol});
  }
  {  // 2
    const std::vector<double> ts{0.1, 0.5, 1.0};
    std::vector<double> res(sub.size());
    for_each_index(quad.exec, sub.size(), [&](std::size_t q) {
      const auto x = point(sub[q]);
      double r = 0.0;
      for (double t : ts) {
        const double h = 0.01 * t;
        const double dt = (-heat(x, t + 2 * h, false).h + 8.0 * heat(x, t + h, false).h -
                           8.0 * heat(x, t - h, false).h + heat(x, t - 2 * h, false).h) /
                          (12.0 * h);
        r = std::max(r, std::abs(dt - heat(x, t, true).lap));
      }
      res[q] = r;
    });
    const double worst = *std::max_element(res.begin(), res.end());
    rep.items.push_back({"2", "heat equation residual", worst, 1e-6, worst <= 1e-6});
  }
  const double fnorm = norm(f0);
  {  // 3
    double C = 0.0;
    for (double t : {1.0 / 16, 0.25, 1.0, 4.0}) {
      std::vector<double> h(np);
      for_each_index(quad.exec, np, [&](std::size_t k) { h[k] = heat(point(k), t, false).h; });
      C = std::max(C, fnorm > 0.0 ? norm(h) / fnorm : 0.0);
    }
    rep.items.push_back({"3", "L^p(w) bound constant C", C, 0.0, std::isfinite(C)});
  }
  {  // 4 and 5
    std::vector<double> sup, lp;
    for (int k = 1; k <= 8; ++k) {
      const double t = std::ldexp(1.0, -2 * k);
      std::vector<double> d(np);
      for_each_index(quad.exec, np, [&](std::size_t i) { d[i] = heat(point(i), t, false).h - f0[i]; });
      double s = 0.0;
      for (double v : d) s = std::max(s, std::abs(v));
      sup.push_back(s);
      lp.push_back(norm(d));
    }
    auto decreasing = [](const std::vector<double>& v) {
      for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1]) && v[i] > 1e-14) return false;
      return true;
    };
    const double tol4 = 1e-4 * (1.0 + supf), tol5 = 1e-4 * (1.0 + fnorm);
    rep.items.push_back({"4", "e^{t Lap} f -> f pointwise", sup.back(), tol4, decreasing(sup) && sup.back() <= tol4});
    rep.items.push_back({"5", "e^{t Lap} f -> f in L^p(w)", lp.back(), tol5, decreasing(lp) && lp.back() <= tol5});
  }
  {  // 6
    const auto lapf = std::make_shared<LaplacianOf>(ev);
    const HeatOperator lop(*lapf);
    std::vector<double> res(sub.size());
    for_each_index(quad.exec, sub.size(), [&](std::size_t q) {
      const auto x = point(sub[q]);
      double r = 0.0;
      if (!cval)
        for (double t : {0.1, 0.5, 1.0}) r = std::max(r, std::abs(heat(x, t, true).lap - lop(x, t, false).h));
      res[q] = r;
    });
    const double worst = *std::max_element(res.begin(), res.end());
    rep.items.push_back({"6", "Lap e^{t Lap} f = e^{t Lap} Lap f", worst, 1e-6, worst <= 1e-6});
  }
  {  // 7
    const double t = 0.5;
    auto W = [&](double rho) {
      return std::pow(4.0 * std::numbers::pi * t, -0.5 * static_cast<double>(n)) * std::exp(-rho * rho / (4.0 * t));
    };
    std::vector<double> vals;
    for (int k = 1; k <= 10; ++k) {
      const double eps = std::ldexp(1.0, -k);
      std::vector<double> I(np);
      for_each_index(quad.exec, np, [&](std::size_t i) {
        I[i] = detail::radial_integral(*ev, point(i), 0.0, eps, false, W);
      });
      vals.push_back(norm(I));
    }
    bool dec = true;
    for (std::size_t i = 1; i < vals.size(); ++i) dec = dec && vals[i] < vals[i - 1];
    const bool ok = dec && vals.back() <= 1e-2 * vals.front();
    rep.items.push_back({"7", "small-ball part of W_t * f -> 0 in L^p(w)", vals.back(), 1e-2 * vals.front(), ok});
  }
  {  // composition
    const FunctionPtr w05 = make_function("heat_kernel(0.5)", n);
    const FunctionPtr w08 = make_function("heat_kernel(0.8)", n);
    const HeatOperator hop(*w05);
    double worst = 0.0;
    for (std::size_t q : sub) {
      const auto x = point(q);
      worst = std::max(worst, std::abs(hop(x, 0.3, false).h - w08->value(x)));
    }
    rep.items.push_back({"composition", "W_0.3 * W_0.5 = W_0.8", worst, 1e-8, worst <= 1e-8});
  }
  return rep;
}

MaximalResult order_sup_fraclap(const SampledFunctionND& f, std::span<const double> s_values,
                                std::span<const double> eps_values, const ScaleLattice& lat0,
                                const QuadratureSpec& quad, std::optional<Window> window) {
  quad.validate();
  if (s_values.empty() || eps_values.empty())
    throw Error(ErrorKind::ParameterOutOfRange, "empty order or eps lattice");
  ScaleLattice lat = lat0;
  lat.validate();
  const FunctionPtr ev = f.require_closed_form("order_sup_fraclap");
  const std::size_t n = f.dim();
  std::vector<FracOrder> orders;
  for (double v : s_values) orders.push_back(FracOrder::s(v, static_cast<int>(n)));
  const auto hn = std::make_shared<HessianNorm>(ev);
  double k2 = 0.0;
  if (const auto& wv = ev->traits().wavevector)
    for (double c : *wv) k2 += c * c;
  const auto idx = lap_points(f.grid, window);
  MaximalResult r;
  r.dim = n;
  r.points = coords(f.grid, idx);
  r.lattice.assign(s_values.begin(), s_values.end());
  r.values.resize(idx.size());
  r.argmax.resize(idx.size());
  std::vector<double> denom(idx.size());
  for_each_index(quad.exec, idx.size(), [&](std::size_t k) {
    const std::span<const double> x(r.points.data() + k * n, n);
    const auto T = truncated_Ts_eps_at(*ev, x, orders, eps_values, quad);
    double m = 0.0, at = s_values[0];
    for (std::size_t j = 0; j < T.size(); ++j)
      if (std::abs(T[j].value) > m) {
        m = std::abs(T[j].value);
        at = s_values[j / eps_values.size()];
      }
    r.values[k] = m;
    r.argmax[k] = at;
    if (k2 > 0.0) {
      denom[k] = (k2 + 1.0) * m_hl_at(*ev, x, lat);  // |D^2 f| = |k|^2 |f|
    } else {
      denom[k] = m_hl_at(*hn, x, lat) + m_hl_at(*ev, x, lat);
    }
  });
  detail::fill_order_ratio(r, denom);
  return r;
}

}  // namespace fraclab
