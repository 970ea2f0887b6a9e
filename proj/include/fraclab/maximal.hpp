#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/exec.hpp"
#include "fraclab/funcspace.hpp"
#include "fraclab/quadrature_spec.hpp"

namespace fraclab {

/// Averaging scales (interval lengths h for M-/M+, ball radii for M).
struct ScaleLattice {
  std::vector<double> scales;  // positive, ascending

  /// base * 2^j for j in [jmin, jmax].
  static ScaleLattice dyadic(int jmin, int jmax, double base = 1.0);
  /// hmin * ratio^k up to (and including) the first value >= hmax.
  static ScaleLattice geometric(double hmin, double hmax, double ratio);
  /// Sorts, drops duplicates; ParameterOutOfRange on empty or non-positive.
  void validate();
};

/// Per-point discrete suprema. For the order-sup operators `argmax` holds the
/// order (alpha or s) attaining the max, and `ratio` the quotient by the
/// maximal-function bound with `constant` its max.
struct MaximalResult {
  std::size_t dim = 1;
  std::vector<double> points;  // row-major, dim coordinates per point
  std::vector<double> values;
  std::vector<double> argmax;
  std::vector<double> lattice;
  std::vector<double> ratio;
  double constant = 0.0;
  std::size_t excluded = 0;  // points dropped (window leaves the samples, or 0/0 ratio)

  std::size_t size() const noexcept { return values.size(); }
};

/// sup over h of (1/h) integral_{t-h}^{t} |f|, and the forward version.
double m_minus_at(const Function& f, double t, const ScaleLattice& lat, double* argmax = nullptr);
double m_plus_at(const Function& f, double t, const ScaleLattice& lat, double* argmax = nullptr);
/// Centered balls: sup over r of |B(x,r)|^{-1} integral_{B(x,r)} |f|.
double m_hl_at(const Function& f, std::span<const double> x, const ScaleLattice& lat, double* argmax = nullptr);

/// Grid versions over the nodes inside `window` (applied to every axis in nD).
/// Without a closed form a point is excluded when one of its windows leaves
/// the sampled interval (WindowTooNarrow if nothing is left).
MaximalResult m_minus(const SampledFunction1D& f, const ScaleLattice& lat, std::optional<Window> window = std::nullopt,
                      Exec exec = Exec::parallel);
MaximalResult m_plus(const SampledFunction1D& f, const ScaleLattice& lat, std::optional<Window> window = std::nullopt,
                     Exec exec = Exec::parallel);
MaximalResult m_hl(const SampledFunctionND& f, const ScaleLattice& lat, std::optional<Window> window = std::nullopt,
                   Exec exec = Exec::parallel);

/// Nonincreasing integrable kernel on [0, inf) (1D) or radial profile on
/// (0, inf) (nD).
struct Kernel {
  std::string name;
  std::function<double(double)> profile;
  double reach = 0.0;        // profile vanishes (or is negligible) beyond this
  bool singular_at_zero = false;
  double singular_power = 0.0;  // profile ~ r^{-power} near 0 when singular
  double mass = 1.0;            // integral over [0, inf), or over R^n for radial kernels
};

/// [0,1] indicator, t^{-1/2} on (0,1], e^{-t}.
Kernel box_kernel();
Kernel inverse_sqrt_kernel();
Kernel exp_kernel();
/// Radial: heat kernel W_t, normalized unit-ball indicator, e^{-|x|}.
Kernel heat_kernel_profile(std::size_t dim, double t);
Kernel unit_ball_kernel(std::size_t dim);
Kernel exp_radial_kernel(std::size_t dim);

struct DominationReport {
  std::string kernel;
  std::vector<double> points;  // row-major
  std::vector<double> lhs;     // |f * eta|
  std::vector<double> rhs;     // M f * ||eta||_1 (M- in 1D one-sided)
  double kernel_mass = 0.0;
  double max_excess = 0.0;     // max of lhs - rhs (negative when strict)
  double tolerance = 0.0;
  bool holds = false;          // max_excess <= tolerance
};

/// |f * eta|(t) against M- f(t) * integral eta. KernelNotMonotone when eta
/// increases between sample points.
DominationReport lorente_domination_check(const SampledFunction1D& f, const Kernel& eta, const ScaleLattice& lat,
                                          const QuadratureSpec& quad = {},
                                          std::optional<Window> window = std::nullopt);
/// |f * eta|(x) against M f(x) * ||eta||_1.
DominationReport radial_domination_check(const SampledFunctionND& f, const Kernel& eta, const ScaleLattice& lat,
                                         const QuadratureSpec& quad = {},
                                         std::optional<Window> window = std::nullopt);

/// max over alphas of |D^a f(t)|, ratio to M-(f') + M- f on the same lattice.
MaximalResult order_sup_fracderiv(const SampledFunction1D& f, std::span<const double> alphas,
                                  const ScaleLattice& lat, const QuadratureSpec& quad = {},
                                  std::optional<Window> window = std::nullopt);

/// max over s and eps of |T_{s,eps} f(x)|, ratio to M(|D^2 f|) + M f.
MaximalResult order_sup_fraclap(const SampledFunctionND& f, std::span<const double> s_values,
                                std::span<const double> eps_values, const ScaleLattice& lat,
                                const QuadratureSpec& quad = {}, std::optional<Window> window = std::nullopt);

/// Dense lattice used by the domination checks: ratio 2^{1/8} over [hmin, hmax].
ScaleLattice dense_lattice(double hmin, double hmax);

}  // namespace fraclab
