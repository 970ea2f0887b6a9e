#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fraclab/exec.hpp"

namespace fraclab {

/// How the singular part of a Marchaud-type integral is treated near tau = 0.
///   taylor_subtract: integrate f(t-tau) - f(t) + tau f'(t) on graded panels and
///                    add the subtracted first-order term analytically.
///   log_substitute:  integrate f(t-tau) - f(t) in u = -log(tau) (no derivative
///                    needed away from the innermost cell); accurate for moderate alpha.
enum class Substitution { taylor_subtract, log_substitute };

/// Every discretization choice for the singular and improper integrals.
struct QuadratureSpec {
  /// Boundary between the singular part (0, split] and the tail.
  double split_point = 1.0;
  /// Gauss-Legendre order on each singular panel. The error estimate compares
  /// against half this order.
  std::size_t n_singular = 16;
  /// Gauss-Legendre order on each tail panel.
  std::size_t n_tail = 16;
  /// Tail truncation radius; unset means "derive from the decay class".
  std::optional<double> tail_radius;
  /// Strictly decreasing truncation radii for the principal-value study.
  std::vector<double> pv_epsilon_schedule{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  Substitution substitution = Substitution::taylor_subtract;
  /// Dyadic panels below the split point for fractional derivatives
  /// (innermost cell is 2^-levels * split, added analytically).
  std::size_t graded_levels = 18;
  /// Same for the principal-value radial integral.
  std::size_t pv_levels = 13;
  /// Same for the semigroup time integral on (0, 1].
  std::size_t time_levels = 27;
  /// Directions on the half circle for n = 2; n = 3 uses angular_nodes / 2
  /// azimuths times angular_nodes / 4 polar nodes on the half sphere.
  std::size_t angular_nodes = 64;
  /// Estimated absolute error allowed, relative to 1 + |value|.
  double tolerance = 1e-6;
  Exec exec = Exec::parallel;

  /// Throws ParameterOutOfRange when an invariant is violated.
  void validate() const;
};

struct PointValue {
  double value = 0.0;
  double error = 0.0;
};

}  // namespace fraclab
