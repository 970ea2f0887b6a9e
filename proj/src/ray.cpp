#include "ray.hpp"

#include <algorithm>
#include <cmath>

#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/special.hpp"

namespace fraclab::detail {

Estimate panel(const Fn& g, double a, double b, std::size_t order) {
  const Rule& hi = gauss_legendre(order);
  const Rule& lo = gauss_legendre(std::max<std::size_t>(order / 2, 2));
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double shi = 0.0, slo = 0.0;
  for (std::size_t i = 0; i < hi.size(); ++i) shi += hi.weights[i] * g(c + h * hi.nodes[i]);
  for (std::size_t i = 0; i < lo.size(); ++i) slo += lo.weights[i] * g(c + h * lo.nodes[i]);
  return {h * shi, std::abs(h * (shi - slo))};
}

namespace {

// Splits [a, b] at sign changes of k seen on a 16-point probe.
Estimate split_at_roots(const Fn& g, double a, double b, std::size_t order, const Fn& k) {
  constexpr int kProbe = 16;
  std::vector<double> cuts{a};
  double xa = a, fa = k(a);
  for (int i = 1; i <= kProbe; ++i) {
    const double xb = i == kProbe ? b : a + (b - a) * i / kProbe;
    const double fb = k(xb);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      double lo = xa, hi = xb, flo = fa;
      for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = k(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    xa = xb;
    fa = fb;
  }
  cuts.push_back(b);
  Estimate out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) out += panel(g, cuts[i], cuts[i + 1], order);
  return out;
}

}  // namespace

Estimate panels(const Fn& g, double a, double b, std::size_t order, double max_width,
                const std::vector<double>& breaks, const Fn* kink) {
  Estimate out;
  if (!(b > a)) return out;
  auto it = std::upper_bound(breaks.begin(), breaks.end(), a);
  double lo = a;
  while (lo < b) {
    double hi = b;
    if (it != breaks.end() && *it < b) hi = *it++;
    if (hi > lo) {
      const double w = hi - lo;
      const auto n = static_cast<std::size_t>(std::ceil(w / max_width - 1e-12));
      const std::size_t m = std::max<std::size_t>(n, 1);
      for (std::size_t k = 0; k < m; ++k) {
        const double p0 = lo + w * static_cast<double>(k) / static_cast<double>(m);
        const double p1 = k + 1 == m ? hi : lo + w * static_cast<double>(k + 1) / static_cast<double>(m);
        out += kink ? split_at_roots(g, p0, p1, order, *kink) : panel(g, p0, p1, order);
      }
    }
    lo = hi;
  }
  return out;
}

Estimate graded(const Fn& g, double r, std::size_t levels, std::size_t order,
                const std::vector<double>& breaks, double max_width) {
  Estimate out;
  double hi = r;
  for (std::size_t k = 0; k < levels; ++k) {
    const double lo = 0.5 * hi;
    out += panels(g, lo, hi, order, std::min(hi, max_width), breaks);
    hi = lo;
  }
  return out;
}

namespace {

// Geometric panels [r, min(2r, r + scale)] from a to b.
Estimate outward(const Fn& g, double a, double b, std::size_t order, double scale,
                 const std::vector<double>& breaks, const Fn* kink) {
  Estimate out;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(b, lo + std::min(std::max(lo, 1e-300), scale));
    out += panels(g, lo, hi, order, scale, breaks, kink);
    lo = hi;
  }
  return out;
}

}  // namespace

Estimate ray_tail(const Fn& g, double a, double beta, const RayInfo& info, std::size_t order) {
  if (info.constant) {
    if (*info.constant == 0.0) return {};
    if (!(beta > 1.0)) throw Error(ErrorKind::TailDivergence, "tail of a nonzero constant diverges");
    return {*info.constant * std::pow(a, 1.0 - beta) / (beta - 1.0), 0.0};
  }
  auto weighted = [&](double r) { return g(r) * std::pow(r, -beta); };
  const double width = 0.5 * info.scale;  // same cap as the singular panels

  if (std::isfinite(info.reach)) {
    if (info.reach <= a) return {};
    return outward(weighted, a, info.reach, order, width, info.breaks, info.kink);
  }
  if (info.exp_rate > 0.0) {
    const double R = a + 40.0 / info.exp_rate;
    Estimate e = outward(weighted, a, R, order, width, info.breaks, info.kink);
    e.error += info.exp_amplitude * std::exp(-info.exp_rate * R) * std::pow(R, -beta) / info.exp_rate;
    return e;
  }
  if (!(beta > 1.0)) throw Error(ErrorKind::TailDivergence, "tail of a non-decaying function diverges");
  if (info.period) {
    const double P = *info.period;
    const double R = a + 4.0 * P;
    Estimate e = outward(weighted, a, R, order, std::min(width, 0.25 * P), info.breaks, info.kink);
    // sum_m integral_0^P g(R+u)(R+u+mP)^{-beta} du = integral_0^P g(R+u) P^{-beta} zeta(beta, (R+u)/P) du
    auto folded = [&](double u) { return g(R + u) * std::pow(P, -beta) * hurwitz_zeta(beta, (R + u) / P); };
    std::function<double(double)> shifted;
    if (info.kink) shifted = [&](double u) { return (*info.kink)(R + u); };
    e += panels(folded, 0.0, P, order, std::min(width, 0.25 * P), {}, info.kink ? &shifted : nullptr);
    return e;
  }
  const double R = std::max(info.truncation, 2.0 * a);
  Estimate e = outward(weighted, a, R, order, width, info.breaks, info.kink);
  e.error += info.bound * std::pow(R, 1.0 - beta) / (beta - 1.0);
  return e;
}

}  // namespace fraclab::detail
