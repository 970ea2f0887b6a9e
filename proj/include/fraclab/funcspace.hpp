#pragma once

#include <string>
#include <vector>

#include "fraclab/function.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/quadrature_spec.hpp"
#include "fraclab/special.hpp"
#include "fraclab/weight.hpp"

namespace fraclab {

/// Closed interval [lo, hi] (a box when applied to every axis of a GridND).
struct Window {
  double lo;
  double hi;
};

/// Samples on a uniform grid, optionally backed by a closed form.
struct SampledFunction1D {
  Grid1D grid;
  std::vector<double> values;
  FunctionPtr closed_form;  // may be null
  DecayClass decay = DecayClass::bounded;

  /// The closed form when present, otherwise a C^1 piecewise-cubic Hermite
  /// interpolant of the samples (see make_interpolant).
  FunctionPtr evaluator() const;
};

struct SampledFunctionND {
  GridND grid;
  std::vector<double> values;
  FunctionPtr closed_form;  // may be null
  DecayClass decay = DecayClass::bounded;

  std::size_t dim() const noexcept { return grid.dim(); }
  /// Throws ParameterOutOfRange when no closed form is attached.
  FunctionPtr require_closed_form(const char* op) const;
};

SampledFunction1D sample(const CatalogEntry& entry, const Grid1D& grid);
SampledFunction1D sample(FunctionPtr f, const Grid1D& grid);
SampledFunctionND sample(const CatalogEntry& entry, const GridND& grid);
SampledFunctionND sample(FunctionPtr f, const GridND& grid);

/// Samples without a closed form. Values must be finite.
SampledFunction1D from_samples(const Grid1D& grid, std::vector<double> values, DecayClass decay);

/// Piecewise-cubic Hermite interpolant; node slopes are fourth-order finite
/// differences. Outside the grid it is 0 for decaying classes (both sides for
/// compact_support and gaussian, the left side for exponential_left) and the
/// edge value otherwise. Every grid node is reported as a breakpoint.
FunctionPtr make_interpolant(const Grid1D& grid, std::vector<double> values, DecayClass decay);

/// A weight sampled on a grid.
struct SampledWeight {
  GridND grid;
  std::vector<double> values;
};

SampledWeight sample_weight(const Weight& w, const Grid1D& grid);
SampledWeight sample_weight(const Weight& w, const GridND& grid);

/// (integral over window of |f|^p w)^{1/p} by the composite trapezoid rule.
/// The window is snapped outward to grid nodes and clipped to the grid.
double weighted_lp_norm(const SampledFunction1D& f, const SampledWeight& w, double p, Window window);
double weighted_lp_norm(const SampledFunctionND& f, const SampledWeight& w, double p, Window window);
/// Same on raw value arrays aligned with `grid`.
double weighted_lp_norm(const GridND& grid, std::span<const double> f, std::span<const double> w,
                        double p, Window window);

struct TailNorm {
  double value;
  /// Bound on the part of the integral beyond the truncation.
  double truncation_bound;
};

/// integral_{-inf}^{A} |f(tau)| / (1 + |tau|^{1+alpha}) dtau.
TailNorm tail_norm_A(const SampledFunction1D& f, const FracOrder& alpha, double A,
                     const QuadratureSpec& quad = {});

/// integral over R^n of |f(x)| / (1 + |x|^{n+2s}) dx (closed form required).
TailNorm ls_tail_norm(const SampledFunctionND& f, const FracOrder& s, const QuadratureSpec& quad = {});

/// The fixed one-sided mollifier: psi(u) = exp(-1/(1-(2u-1)^2)) / Z on [0, 1].
double mollifier_kernel(double u);

/// (f * psi_eps)(t) = integral_0^eps f(t - tau) psi_eps(tau) dtau on f's grid.
/// The result carries a closed form (value and derivatives by the same
/// convolution of f', f''). Throws EpsilonTooSmall when eps < grid spacing.
SampledFunction1D mollify_one_sided(const SampledFunction1D& f, double eps);

/// CSV with header "t,value" (1D), "t,x2,value" (2D) or "t,x2,x3,value" (3D).
std::string to_csv(const SampledFunction1D& f);
std::string to_csv(const SampledFunctionND& f);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace fraclab
