#pragma once

#include <string>
#include <vector>

namespace graspaff::detail {

struct Bar {
  std::string label;
  double value = 0.0;
  double error = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Minimal SVG renderers with labeled axes.
std::string svg_bar_chart(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars,
                          double y_min, double y_max);
std::string svg_scatter(const std::string& title, const std::string& x_label, const std::string& y_label,
                        const std::vector<Point>& points);
std::string svg_line(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<Point>& points, const std::vector<double>& errors, bool log_x);

}  // namespace graspaff::detail
