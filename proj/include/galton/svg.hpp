#pragma once

#include <string>
#include <vector>

namespace galton {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

// Deterministic self-contained SVG line plot (fixed canvas, axes, ticks,
// one polyline per series, legend from the labels).  Identical inputs give
// byte-identical output.  Throws EmptySeries when no series has a point.
std::string render_line_plot(const std::vector<PlotSeries>& series,
                             const std::string& title,
                             const std::string& x_label,
                             const std::string& y_label);

}  // namespace galton
