#pragma once

#include <string>
#include <vector>

#include "vda/metrics/table.h"

namespace vda::cli {

// Scatter of the first two columns of xy, one colour per distinct label,
// with a legend. Always a complete SVG 1.1 document, even for one point.
std::string scatter_svg(const metrics::Matrix& xy, const std::vector<int>& labels, const std::string& title,
                        const std::string& legend_name);

struct Curve {
  std::string name;
  std::vector<double> y;
};

// Line plot of several series against a shared x axis (one polyline each).
std::string line_plot_svg(const std::vector<double>& x, const std::vector<Curve>& curves, const std::string& title,
                          const std::string& x_label);

}  // namespace vda::cli
