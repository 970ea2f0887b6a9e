#pragma once

// Internal: shared pieces of the maximal-function code.

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fraclab/function.hpp"
#include "fraclab/funcspace.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/maximal.hpp"

namespace fraclab::detail {

/// integral_0^h |f(t + dir u)| du for each (ascending) h.
std::vector<double> cumulative_abs(const Function& f, double t, int dir, std::span<const double> hs);
/// integral over the unit sphere of f(x + rho w) (|f| when absval).
double sphere_integral(const Function& f, std::span<const double> x, double rho, bool absval, double ell);
/// integral_a^b weight(rho) rho^{n-1} sphere_integral(rho) drho.
double radial_integral(const Function& f, std::span<const double> x, double a, double b, bool absval,
                       const std::function<double(double)>& weight);
/// |f| over centered balls of (ascending) radii.
std::vector<double> cumulative_ball(const Function& f, std::span<const double> x, std::span<const double> rs);
/// Distances from x to the nearest and farthest point of f's support box.
std::pair<double, double> radial_extent(const Function& f, std::span<const double> x);
double ball_volume(std::size_t n, double r);
double sphere_area(std::size_t n);
std::vector<std::size_t> window_points(const GridND& grid, std::optional<Window> w);
/// ratio = values / denom, skipping denominators below 1e-12 of their max.
void fill_order_ratio(MaximalResult& r, const std::vector<double>& denom);

}  // namespace fraclab::detail
