#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/funcspace.hpp"
#include "fraclab/quadrature_spec.hpp"
#include "fraclab/report.hpp"
#include "fraclab/special.hpp"
#include "fraclab/weight.hpp"

namespace fraclab {

enum class LapMethod { semigroup, pv, spectral };

const char* to_string(LapMethod m);
LapMethod parse_lap_method(const std::string& s);

/// e^{t Laplacian} f on the nodes of a window.
struct HeatEvaluation {
  double t = 0.0;
  std::size_t dim = 1;
  std::vector<double> points;  // row-major
  std::vector<double> values;
  /// Gauss-Hermite nodes reach |y| <= 2 sqrt(t) z_max; the support-box sum covers the box.
  double kernel_truncation_radius = 0.0;
};

struct FracLapResult {
  std::size_t dim = 1;
  std::vector<double> points;  // row-major
  std::vector<double> values;
  std::vector<double> error;
  FracOrder s;
  LapMethod method = LapMethod::semigroup;
};

/// Convolution with W_t(x) = (4 pi t)^{-n/2} e^{-|x|^2/(4t)} at one point:
/// Gauss-Hermite in the kernel variable while 2 sqrt(t) is within one feature
/// length, otherwise a Gauss-Legendre sum over f's support box.
/// TruncationBudgetExceeded when neither fits the node cap.
double heat_at(const Function& f, std::span<const double> x, double t);
HeatEvaluation heat_semigroup(const SampledFunctionND& f, double t, const QuadratureSpec& quad = {},
                              std::optional<Window> window = std::nullopt);

/// (1/Gamma(-s)) integral_0^inf (e^{t Laplacian} f(x) - f(x)) t^{-1-s} dt.
/// (0,1]: dyadic panels with t Laplacian f subtracted; [1,inf): geometric
/// panels to T plus the analytic M_0 (4 pi t)^{-n/2} tail. TailDivergence for
/// inputs without a known large-time limit.
std::vector<PointValue> frac_laplacian_semigroup_at(const Function& f, std::span<const double> x,
                                                    std::span<const FracOrder> s, const QuadratureSpec& quad = {});
/// c_{n,s} over a half-sphere of directions of
///   integral_0^inf (2f(x) - f(x + r w) - f(x - r w)) r^{-1-2s} dr
/// with the second-order Taylor term removed on (0,1].
std::vector<PointValue> frac_laplacian_pv_at(const Function& f, std::span<const double> x,
                                             std::span<const FracOrder> s, const QuadratureSpec& quad = {});
/// c_{n,s} integral_{|z|>eps} (f(x) - f(x+z)) |z|^{-n-2s} dz, one value per (s, eps),
/// s outer, eps inner.
std::vector<PointValue> truncated_Ts_eps_at(const Function& f, std::span<const double> x,
                                            std::span<const FracOrder> s, std::span<const double> eps,
                                            const QuadratureSpec& quad = {});

FracLapResult frac_laplacian_semigroup(const SampledFunctionND& f, const FracOrder& s, const QuadratureSpec& quad = {},
                                       std::optional<Window> window = std::nullopt);
FracLapResult frac_laplacian_pv(const SampledFunctionND& f, const FracOrder& s, const QuadratureSpec& quad = {},
                                std::optional<Window> window = std::nullopt);
/// Several orders at once; evaluations are shared.
std::vector<FracLapResult> frac_laplacian(const SampledFunctionND& f, std::span<const FracOrder> s, LapMethod method,
                                          const QuadratureSpec& quad = {},
                                          std::optional<Window> window = std::nullopt);
FracLapResult truncated_Ts_eps(const SampledFunctionND& f, const FracOrder& s, double eps,
                               const QuadratureSpec& quad = {}, std::optional<Window> window = std::nullopt);

/// Oracle: |xi|^{2s} on the discrete spectrum; every axis must be periodic
/// (last sample equal to the first) or NonPeriodicInput is thrown.
FracLapResult spectral_fraclap(const SampledFunctionND& f, const FracOrder& s);

/// Rows per s: lp_error_to_laplacian = ||(-Laplacian)^s f + Laplacian f||,
/// lp_error_to_function = ||(-Laplacian)^s f - f|| in L^p(w) over the window,
/// plus sup versions.
SweepReport laplacian_limit_sweep(const SampledFunctionND& f, std::span<const double> s_values, double p,
                                  const Weight& w, const QuadratureSpec& quad = {},
                                  std::optional<Window> window = std::nullopt,
                                  LapMethod method = LapMethod::semigroup);

struct SuiteItem {
  std::string id;
  std::string description;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteReport {
  std::vector<SuiteItem> items;
  bool all_passed() const;
};

/// Numerical checks of the heat-semigroup properties on the window nodes:
///  1  sup_t |e^{t Lap} f| <= M f
///  2  heat equation residual |d_t e^{t Lap} f - Lap e^{t Lap} f|
///  3  ||e^{t Lap} f||_{L^p(w)} <= C ||f||_{L^p(w)}, C reported
///  4  e^{t Lap} f -> f pointwise as t -> 0
///  5  same in L^p(w)
///  6  ||Lap e^{t Lap} f - e^{t Lap} Lap f||
///  7  integral_{|y|<eps} W_t(y) f(x-y) dy -> 0 in L^p(w)
///  composition: e^{t Lap} applied to heat_kernel(t0) against heat_kernel(t0 + t)
SuiteReport semigroup_property_suite(const SampledFunctionND& f, const Weight& w, double p = 2.0,
                                     const QuadratureSpec& quad = {}, std::optional<Window> window = std::nullopt);

}  // namespace fraclab
