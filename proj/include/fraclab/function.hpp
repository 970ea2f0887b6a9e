#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <span>
#include <string>
#include <vector>

namespace fraclab {

enum class DecayClass { compact_support, gaussian, exponential_left, bounded };

const char* to_string(DecayClass c);

/// What the quadratures need to know about a function beyond its values.
struct FunctionTraits {
  DecayClass decay = DecayClass::bounded;
  /// Smallest length over which the function changes appreciably.
  double length_scale = 1.0;
  /// Per-axis feature length (infinity when constant along that axis).
  std::vector<double> axis_scales;
  /// Box outside of which |f| is below 1e-19 * sup|f| (infinite when unbounded).
  std::vector<double> support_lo;
  std::vector<double> support_hi;
  /// 1D points where f or one of its first two derivatives jumps.
  std::vector<double> breakpoints;
  /// f(x) = A cos(k.x + phase): periodic along every ray with |k.w| > 0.
  std::optional<std::vector<double>> wavevector;
  std::optional<double> constant_value;
  /// Integral over R^n, when finite and known.
  std::optional<double> total_mass;
  double sup_abs = 1.0;
  /// exponential_left only: |f(t - tau)| <= |f(t)| e^{-rate tau}.
  double left_decay_rate = 0.0;
  /// C^2 everywhere (closed-form derivatives are classical).
  bool smooth = true;
  /// limit of e^{t Laplacian} f as t -> infinity (0 for decaying data).
  std::optional<double> heat_limit;
};

/// A function on R^n with closed-form value, gradient and Hessian.
class Function {
 public:
  virtual ~Function() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> g) const = 0;
  /// Row-major n x n.
  virtual void hessian(std::span<const double> x, std::span<double> h) const = 0;
  virtual const FunctionTraits& traits() const = 0;
  virtual std::string name() const = 0;
  /// Summands c_i f_i when the function is a linear combination, else empty.
  virtual std::vector<std::pair<double, std::shared_ptr<const Function>>> terms() const { return {}; }

  double laplacian(std::span<const double> x) const;
  /// Frobenius norm of the Hessian.
  double hessian_norm(std::span<const double> x) const;

  double operator()(double t) const { return value(std::span<const double>(&t, 1)); }
  double d1(double t) const;
  double d2(double t) const;
};

using FunctionPtr = std::shared_ptr<const Function>;

enum class Family { gaussian, bump, exp_growth, cosine, heat_kernel, indicator, constant };

const char* to_string(Family f);

/// Catalog identity: a family plus its parameter list.
///
/// Parameter conventions (n = dimension the entry is sampled in):
///   gaussian(mu, sigma)     e^{-|x - mu|^2 / (2 sigma^2)}, peak 1 (unnormalized)
///   bump(center, radius)    exp(1 - 1/(1 - |x-c|^2/R^2)) inside the ball, peak 1
///   exp_growth(lambda)      e^{lambda x_1}
///   cosine(k_1[, k_2, ...]) cos(k.x), missing components are 0
///   heat_kernel(t0)         (4 pi t0)^{-n/2} e^{-|x|^2/(4 t0)}
///   indicator(a, b)         1 on the ball with diameter [a, b] on every axis
///   constant(c)
struct CatalogEntry {
  std::string name;
  Family family;
  std::vector<double> parameters;
};

/// Parses "gaussian", "cosine(3)", "bump(0,1)". Bare names get default parameters.
CatalogEntry parse_entry(const std::string& spec);
/// Names of the built-in function entries.
std::vector<std::string> function_catalog();

FunctionPtr make_function(const CatalogEntry& entry, std::size_t dim = 1);
FunctionPtr make_function(const std::string& spec, std::size_t dim = 1);

/// f(-x), reusing the closed form of f.
FunctionPtr reflect(FunctionPtr f);
/// a f + b g.
FunctionPtr linear_combination(double a, FunctionPtr f, double b, FunctionPtr g);
/// f(x - c) (shift along every axis by the same c).
FunctionPtr translate(FunctionPtr f, double c);
/// f(lambda x), lambda > 0.
FunctionPtr dilate(FunctionPtr f, double lambda);
/// f' as a 1D function (needs f'' for its own derivative; f''' is not available
/// so its second derivative is a centered difference of f'').
FunctionPtr derivative(FunctionPtr f);

}  // namespace fraclab
