#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fraclab/exec.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/quadrature_spec.hpp"
#include "fraclab/weight.hpp"

namespace fraclab {

/// Finite stand-in for "all a and all h > 0": centers times dyadic scales.
/// In nD the centers are ball centers (row-major, `dim` per center) and the
/// scales are radii; in 1D two-sided checks use intervals [a - h, a + h].
struct LatticeSpec {
  std::size_t dim = 1;
  std::vector<double> centers;
  std::vector<double> scales;  // positive, ascending

  /// Centers on the grid nodes, scales 2^j for j in [jmin, jmax].
  static LatticeSpec on_grid(const Grid1D& grid, int jmin = -10, int jmax = 10);
  static LatticeSpec on_grid(const GridND& grid, int jmin = -10, int jmax = 10);
  std::size_t n_centers() const noexcept { return dim ? centers.size() / dim : 0; }
  void validate() const;
};

enum class WeightSide { minus, plus, two_sided };

struct ScanRow {
  std::vector<double> center;
  double h = 0.0;
  double product = 0.0;  // may be +inf
};

struct WeightScan {
  std::vector<ScanRow> rows;  // centers outer, scales inner
  std::size_t floored = 0;    // weight values raised to 1e-300 before exponentiation
};

/// The defining product at every lattice point:
///   minus:     avg_{[a,a+h]} w ^{1/p}  avg_{[a-h,a]} w^{1-p'} ^{1/p'}
///   plus:      avg_{[a-h,a]} w ^{1/p}  avg_{[a,a+h]} w^{1-p'} ^{1/p'}
///   two_sided: both averages over the ball B(a, h).
WeightScan weight_scan(const Weight& w, double p, WeightSide side, const LatticeSpec& lat,
                       const QuadratureSpec& quad = {});

/// Lattice max of the product (a lower bound for the class constant).
/// IntegralOverflow ("cap exceeded at scale h") when some product exceeds cap.
struct WeightConstant {
  double value = 0.0;
  std::vector<double> argmax_center;
  double argmax_h = 0.0;
  std::size_t floored = 0;
};

WeightConstant sawyer_minus_constant(const Weight& w, double p, const LatticeSpec& lat,
                                     const QuadratureSpec& quad = {}, double cap = 1e12);
WeightConstant sawyer_plus_constant(const Weight& w, double p, const LatticeSpec& lat,
                                    const QuadratureSpec& quad = {}, double cap = 1e12);
/// nD weights must be constant or radial (|x|^beta).
WeightConstant muckenhoupt_constant(const Weight& w, double p, const LatticeSpec& balls,
                                    const QuadratureSpec& quad = {}, double cap = 1e12);

struct A1Report {
  double ratio = 0.0;  // max over interior points of M+w / w
  double argmax_t = 0.0;
  double argmax_h = 0.0;
  bool cap_exceeded = false;
};

/// M+ uses dyadic scales 2^j, j in [jmin, jmax]; interior = nodes not on the ends.
A1Report a1_minus_ratio(const Weight& w, const Grid1D& grid, int jmin = -10, int jmax = 10, double cap = 1e12,
                        Exec exec = Exec::parallel);

/// integral_a^b w^q (1D), graded toward singular points; +inf when divergent.
double weight_integral(const Weight& w, double q, double a, double b, std::size_t* floored = nullptr);

}  // namespace fraclab
