#pragma once

// Internal: panel quadrature with embedded error estimates for the singular
// and improper 1D integrals behind every operator.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace fraclab::detail {

struct Estimate {
  double value = 0.0;
  double error = 0.0;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

using Fn = std::function<double(double)>;

/// Gauss-Legendre of `order` on [a, b]; error = |G_order - G_{order/2}|.
Estimate panel(const Fn& g, double a, double b, std::size_t order);

/// Panels on [a, b] split at the sorted `breaks` and no wider than max_width.
/// When `kink` is given, each panel is further split at the sign changes of
/// kink (g is then typically |kink| times something smooth).
Estimate panels(const Fn& g, double a, double b, std::size_t order, double max_width,
                const std::vector<double>& breaks, const Fn* kink = nullptr);

/// integral of g over [r 2^-levels, r] on dyadic panels, split at breaks.
Estimate graded(const Fn& g, double r, std::size_t levels, std::size_t order,
                const std::vector<double>& breaks, double max_width = std::numeric_limits<double>::infinity());

/// What is known about g(r) for r >= a along a ray.
struct RayInfo {
  /// g(r) is negligible (or exactly 0) beyond this radius.
  double reach = std::numeric_limits<double>::infinity();
  /// Panel width cap (feature size of g).
  double scale = 1.0;
  /// Radii where g is not smooth, sorted.
  std::vector<double> breaks;
  /// g is periodic with this period.
  std::optional<double> period;
  /// g is constant.
  std::optional<double> constant;
  /// |g(r)| <= amplitude e^{-rate r} when rate > 0.
  double exp_rate = 0.0;
  double exp_amplitude = 0.0;
  /// sup |g|, used for truncation bounds of bounded non-periodic rays.
  double bound = std::numeric_limits<double>::infinity();
  /// Truncation radius for bounded non-periodic rays.
  double truncation = 1e4;
  /// Split panels at sign changes of this function (see panels()).
  const Fn* kink = nullptr;
};

/// integral_a^inf g(r) r^{-beta} dr. Throws TailDivergence when the tail of a
/// non-decaying g cannot converge (beta <= 1).
Estimate ray_tail(const Fn& g, double a, double beta, const RayInfo& info, std::size_t order);

}  // namespace fraclab::detail
