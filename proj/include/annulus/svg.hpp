#pragma once

// Static SVG plots. Callers pass the same vectors they write to CSV, so a
// figure never shows numbers the tables do not contain.

#include <string>
#include <vector>

#include "annulus/geometry.hpp"

namespace annulus {

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

// Line plot; non-finite values are skipped.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool logx = false);

struct Polyline {
  std::vector<StripPoint> pts;
  std::string color = "black";
  double width = 1.0;
};

// Polylines drawn in strip coordinates inside `view` (t up).
std::string svg_strip(const std::string& title, const std::vector<Polyline>& lines, Box view);

}  // namespace annulus
