#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fraclab/funcspace.hpp"
#include "fraclab/quadrature_spec.hpp"
#include "fraclab/report.hpp"
#include "fraclab/special.hpp"
#include "fraclab/weight.hpp"

namespace fraclab {

enum class Side { left, right };

/// Values on the grid nodes of an evaluation window.
struct FracDerivResult {
  std::vector<double> t;
  std::vector<double> values;
  std::vector<double> error;
  FracOrder alpha;
  Side variant = Side::left;
};

/// Left Marchaud derivative
///   (1/Gamma(-a)) integral_0^inf (f(t - tau) - f(t)) tau^{-1-a} dtau
/// on (0, split] by graded panels (see Substitution), beyond by tail panels
/// sized from the decay class. Throws QuadratureNotConverged when the
/// embedded error estimate exceeds quad.tolerance * (1 + |value|).
PointValue marchaud_left_at(const Function& f, double t, const FracOrder& alpha, const QuadratureSpec& quad = {});
/// Several orders at one point; function evaluations are shared.
std::vector<PointValue> marchaud_left_at(const Function& f, double t, std::span<const FracOrder> alphas,
                                         const QuadratureSpec& quad = {});
/// Right derivative, through marchaud_right(f)(t) = marchaud_left(f(-.))(-t).
PointValue marchaud_right_at(const FunctionPtr& f, double t, const FracOrder& alpha, const QuadratureSpec& quad = {});
/// Left Weyl integral (1/Gamma(a)) integral_0^inf f(t - tau) tau^{a-1} dtau.
/// Throws TailDivergence for inputs that do not decay toward -infinity.
PointValue weyl_integral_at(const Function& f, double t, const FracOrder& alpha, const QuadratureSpec& quad = {});

/// Operators on the grid nodes of f inside `window` (whole grid when unset).
FracDerivResult marchaud_left(const SampledFunction1D& f, const FracOrder& alpha, const QuadratureSpec& quad = {},
                              std::optional<Window> window = std::nullopt);
FracDerivResult marchaud_right(const SampledFunction1D& f, const FracOrder& alpha, const QuadratureSpec& quad = {},
                               std::optional<Window> window = std::nullopt);
FracDerivResult weyl_integral(const SampledFunction1D& f, const FracOrder& alpha, const QuadratureSpec& quad = {},
                              std::optional<Window> window = std::nullopt);

struct FtfcReport {
  double alpha = 0.0;
  double spacing = 0.0;  // grid spacing of the sampled Weyl integral
  double sup_distance = 0.0;
  double l2_distance = 0.0;
  Window interior{0.0, 0.0};
};

/// Samples g = I^a f on a grid padded to the left edge of f's support,
/// applies the left Marchaud derivative to the interpolant of those samples
/// and compares with f on the interior half-window.
///
/// The window is the support box of f clipped to 4 length scales around its
/// center (bump(c,R): [c-R, c+R]; gaussian(mu,s): [mu-4s, mu+4s]); the grid
/// spacing is length_scale / points_per_scale.
FtfcReport ftfc_compose(const FunctionPtr& f, const FracOrder& alpha, const QuadratureSpec& quad = {},
                        double points_per_scale = 32.0);

/// Fourier oracle: multiplies the discrete spectrum of periodic samples by
/// (i xi)^a (principal branch; the Nyquist mode gets the real part). Valid for
/// trigonometric polynomials resolved by the grid. The last grid point must
/// repeat the first (NonPeriodicInput otherwise).
SampledFunction1D spectral_fracderiv(const SampledFunction1D& f, const FracOrder& alpha);

/// Rows per alpha: lp_error_to_derivative = ||D^a f - f'||, lp_error_to_function
/// = ||D^a f - f|| in L^p(w) over the window, plus the sup versions.
SweepReport derivative_limit_sweep(const SampledFunction1D& f, std::span<const double> alphas, double p,
                                   const Weight& w, const QuadratureSpec& quad = {},
                                   std::optional<Window> window = std::nullopt);

}  // namespace fraclab
