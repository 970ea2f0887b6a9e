#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fraclab {

enum class WeightFamily { constant, exp_decay, exp_growth, power, piecewise, derived };

const char* to_string(WeightFamily f);

/// A strictly positive, locally integrable weight on R^n.
///
/// Catalog (t = x_1 in the exponential families, |x| in power):
///   constant(c)        c
///   exp_decay(lambda)  e^{-lambda t}
///   exp_growth(lambda) e^{lambda t}
///   power(beta)        |x|^beta, singular (or vanishing) at the origin
///   piecewise(a, b)    a for t < 0, b for t >= 0
class Weight {
 public:
  using Eval = std::function<double(std::span<const double>)>;

  Weight(std::string name, WeightFamily family, std::size_t dim, Eval eval, double length_scale,
         std::vector<double> singular_points = {}, bool radial_singularity = false);

  double operator()(std::span<const double> x) const { return eval_(x); }
  double operator()(double t) const { return eval_(std::span<const double>(&t, 1)); }

  const std::string& name() const noexcept { return name_; }
  WeightFamily family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return dim_; }
  /// Scale on which the weight changes by O(1).
  double length_scale() const noexcept { return length_scale_; }
  /// 1D points where the weight is singular, vanishes or jumps.
  const std::vector<double>& singular_points() const noexcept { return singular_; }
  /// True when the only singularity in R^n sits at the origin.
  bool radial_singularity() const noexcept { return radial_; }

  /// x -> w(x)^q (used for the dual weight w^{1-p'}).
  Weight power(double q) const;
  /// x -> w(-x).
  Weight reflected() const;
  /// x -> c w(x), c > 0.
  Weight scaled(double c) const;

 private:
  std::string name_;
  WeightFamily family_;
  std::size_t dim_;
  Eval eval_;
  double length_scale_;
  std::vector<double> singular_;
  bool radial_;
};

std::vector<std::string> weight_catalog();

/// Parses "exp_decay(1)", "power(0.5)", "constant" (alias "one").
Weight make_weight(const std::string& spec, std::size_t dim = 1);

}  // namespace fraclab
