#pragma once

#include <string>
#include <vector>

namespace qg::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Log-log line chart. Non-positive values are dropped. With
/// reference_slope > 0 a dashed line of that slope is drawn through the
/// first point of the first series.
std::string loglog_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                         const std::vector<Series>& series, double reference_slope = 0.5);

}  // namespace qg::svg
