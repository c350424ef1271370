#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hallcal::plots {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lower;  // optional shaded band
  std::vector<double> upper;
  bool markers = false;
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Writes a static line plot as SVG.
void write_svg(const std::filesystem::path& path, const Figure& fig);

}  // namespace hallcal::plots
