#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fraclab {

/// Uniform grid t_min, t_min + h, ..., t_max.
class Grid1D {
 public:
  Grid1D(double t_min, double t_max, std::size_t n_points);

  double t_min() const noexcept { return t_min_; }
  double t_max() const noexcept { return t_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double operator[](std::size_t i) const noexcept {
    return i + 1 == n_ ? t_max_ : t_min_ + h_ * static_cast<double>(i);
  }
  /// Index of the grid point nearest to t (clamped).
  std::size_t nearest(double t) const noexcept;
  std::vector<double> points() const;

  bool operator==(const Grid1D& other) const noexcept = default;

 private:
  double t_min_;
  double t_max_;
  std::size_t n_;
  double h_;
};

/// Tensor-product grid in dimension 1..3, row-major (last axis fastest).
class GridND {
 public:
  static constexpr std::size_t kDefaultBudget = 4'000'000;

  explicit GridND(std::vector<Grid1D> axes, std::size_t point_budget = kDefaultBudget);
  /// Same 1D grid on every axis.
  GridND(const Grid1D& axis, std::size_t dim, std::size_t point_budget = kDefaultBudget);

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return total_; }
  const Grid1D& axis(std::size_t k) const { return axes_.at(k); }
  const std::vector<Grid1D>& axes() const noexcept { return axes_; }
  /// Cell volume (product of spacings).
  double cell_volume() const noexcept;
  void point(std::size_t flat, std::span<double> out) const;
  std::vector<double> point(std::size_t flat) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const std::size_t> idx) const;

  bool operator==(const GridND& other) const noexcept { return axes_ == other.axes_; }

 private:
  std::vector<Grid1D> axes_;
  std::size_t total_ = 1;
};

}  // namespace fraclab
