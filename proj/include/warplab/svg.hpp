#pragma once

#include <string>
#include <vector>

namespace warplab::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;  ///< non-positive values are dropped
  std::vector<Series> series;
  /// Horizontal reference lines (bounds), drawn dashed.
  std::vector<std::pair<std::string, double>> hlines;
  int width = 720;
  int height = 440;
};

/// Standalone SVG document. Deterministic for identical input.
std::string render(const LineChart& chart);

std::string escape(const std::string& s);

}  // namespace warplab::svg
