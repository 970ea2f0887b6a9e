#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fraclab {

/// One (order or scale, metric, value, error estimate) line of a sweep.
struct ReportRow {
  double order = 0.0;
  std::string metric;
  double value = 0.0;
  double error = 0.0;

  bool operator==(const ReportRow&) const = default;
};

/// Table produced by a convergence or domination experiment.
struct SweepReport {
  std::vector<ReportRow> rows;
  /// Ordered key/value pairs (config echo, grid, version, optional runtime).
  std::vector<std::pair<std::string, std::string>> metadata;

  /// Stable sort by order.
  void sort_rows();
  /// Value of the first row with this order and metric; throws if absent.
  double value(double order, const std::string& metric) const;
  /// All values of a metric, in row order.
  std::vector<double> series(const std::string& metric) const;

  bool operator==(const SweepReport&) const = default;
};

}  // namespace fraclab
