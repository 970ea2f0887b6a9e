#include "fraclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace fraclab {
namespace {

Rule build_legendre(std::size_t n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return r;
}

// Newton iteration on orthonormal Hermite recurrences with the classical
// asymptotic starting guesses.
Rule build_hermite(std::size_t n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const std::size_t m = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(dn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * r.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * r.nodes[1];
    } else {
      z = 2.0 * z - r.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * dn) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    r.nodes[i] = z;
    r.nodes[n - 1 - i] = -z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  std::reverse(r.nodes.begin(), r.nodes.end());
  std::reverse(r.weights.begin(), r.weights.end());
  return r;
}

template <Rule (*Build)(std::size_t)>
const Rule& cached(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(Build(n));
  return *slot;
}

}  // namespace

const Rule& gauss_legendre(std::size_t n) { return cached<build_legendre>(n); }
const Rule& gauss_hermite(std::size_t n) { return cached<build_hermite>(n); }

void NodeSet::append(const Rule& rule, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    x.push_back(mid + half * rule.nodes[i]);
    w.push_back(half * rule.weights[i]);
  }
}

NodeSet composite(double a, double b, std::size_t order, double max_width,
                  std::span<const double> breaks) {
  NodeSet out;
  if (!(b > a)) return out;
  std::vector<double> cuts{a};
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const Rule& rule = gauss_legendre(order);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / max_width)));
    const double width = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double pa = lo + width * p;
      const double pb = (p + 1 == panels) ? hi : pa + width;
      out.append(rule, pa, pb);
    }
  }
  return out;
}

NodeSet graded_toward_zero(double r, std::size_t levels, std::size_t order) {
  NodeSet out;
  const Rule& rule = gauss_legendre(order);
  double hi = r;
  for (std::size_t k = 0; k < levels; ++k) {
    const double lo = 0.5 * hi;
    out.append(rule, lo, hi);
    hi = lo;
  }
  return out;
}

NodeSet geometric_outward(double a, double b, std::size_t order) {
  NodeSet out;
  const Rule& rule = gauss_legendre(order);
  double lo = a;
  while (lo < b) {
    const double hi = std::min(2.0 * lo, b);
    out.append(rule, lo, hi);
    lo = hi;
  }
  return out;
}

double integrate(const std::function<double(double)>& f, const NodeSet& nodes) {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += nodes.w[i] * f(nodes.x[i]);
  return s;
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t order,
                 double max_width, std::span<const double> breaks) {
  return integrate(f, composite(a, b, order, max_width, breaks));
}

}  // namespace fraclab
