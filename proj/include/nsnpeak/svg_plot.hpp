#pragma once

#include <string>
#include <vector>

namespace nsnpeak::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color{"#1f77b4"};
  bool dashed{false};
};

struct Marker {
  double x{0.0};
  std::string label;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> markers; // vertical lines
  bool log_x{false};
};

/// Self-contained SVG document with the panels stacked vertically.
[[nodiscard]] std::string render(const std::vector<Panel>& panels,
                                 int width = 720, int panel_height = 260);

} // namespace nsnpeak::svg
