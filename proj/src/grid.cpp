#include "fraclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fraclab/error.hpp"

namespace fraclab {

Grid1D::Grid1D(double t_min, double t_max, std::size_t n_points)
    : t_min_(t_min), t_max_(t_max), n_(n_points) {
  if (!(t_min < t_max)) throw Error(ErrorKind::ParameterOutOfRange, "grid needs t_min < t_max");
  if (n_points < 2) throw Error(ErrorKind::ParameterOutOfRange, "grid needs at least 2 points");
  h_ = (t_max - t_min) / static_cast<double>(n_points - 1);
}

std::size_t Grid1D::nearest(double t) const noexcept {
  const double r = std::round((t - t_min_) / h_);
  if (r <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(r), n_ - 1);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)[i];
  return out;
}

GridND::GridND(std::vector<Grid1D> axes, std::size_t point_budget) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 3)
    throw Error(ErrorKind::ParameterOutOfRange, "grid dimension must be 1, 2 or 3");
  for (const auto& a : axes_) total_ *= a.size();
  if (total_ > point_budget)
    throw Error(ErrorKind::ParameterOutOfRange,
                "grid has " + std::to_string(total_) + " points, budget " + std::to_string(point_budget));
}

GridND::GridND(const Grid1D& axis, std::size_t dim, std::size_t point_budget)
    : GridND(std::vector<Grid1D>(dim, axis), point_budget) {}

double GridND::cell_volume() const noexcept {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.spacing();
  return v;
}

std::vector<std::size_t> GridND::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    idx[k] = flat % axes_[k].size();
    flat /= axes_[k].size();
  }
  return idx;
}

std::size_t GridND::flatten(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) flat = flat * axes_[k].size() + idx[k];
  return flat;
}

void GridND::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t k = axes_.size(); k-- > 0;) {
    out[k] = axes_[k][flat % axes_[k].size()];
    flat /= axes_[k].size();
  }
}

std::vector<double> GridND::point(std::size_t flat) const {
  std::vector<double> p(axes_.size());
  point(flat, p);
  return p;
}

}  // namespace fraclab
