#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fraclab {

/// Nodes and weights of a rule on a reference interval.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre rule on [-1, 1]. Cached per n; safe to call concurrently.
const Rule& gauss_legendre(std::size_t n);

/// Gauss-Hermite rule for weight e^{-z^2} on the real line. Cached per n.
const Rule& gauss_hermite(std::size_t n);

/// Node/weight list for a concrete integral (already scaled to its interval).
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;

  void append(const Rule& rule, double a, double b);
  std::size_t size() const noexcept { return x.size(); }
};

/// Composite Gauss-Legendre over [a, b] split at `breaks` and into panels no
/// wider than `max_width`.
NodeSet composite(double a, double b, std::size_t order, double max_width,
                  std::span<const double> breaks = {});

/// Panels [r 2^{-k-1}, r 2^{-k}] for k = 0..levels-1 toward 0 (ratio 1/2).
NodeSet graded_toward_zero(double r, std::size_t levels, std::size_t order);

/// Panels [a 2^k, a 2^{k+1}] until `b` (last panel clipped).
NodeSet geometric_outward(double a, double b, std::size_t order);

double integrate(const std::function<double(double)>& f, const NodeSet& nodes);

/// Adaptive-free composite integral, convenience wrapper over `composite`.
double integrate(const std::function<double(double)>& f, double a, double b, std::size_t order,
                 double max_width, std::span<const double> breaks = {});

}  // namespace fraclab
