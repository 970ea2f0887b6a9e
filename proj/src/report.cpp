#include "fraclab/report.hpp"

#include <algorithm>

#include "fraclab/error.hpp"

namespace fraclab {

void SweepReport::sort_rows() {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) { return a.order < b.order; });
}

double SweepReport::value(double order, const std::string& metric) const {
  for (const auto& r : rows)
    if (r.order == order && r.metric == metric) return r.value;
  throw Error(ErrorKind::ParameterOutOfRange, "no row for metric " + metric);
}

std::vector<double> SweepReport::series(const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.metric == metric) out.push_back(r.value);
  return out;
}

}  // namespace fraclab
