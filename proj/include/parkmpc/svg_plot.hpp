#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace parkmpc {

struct PlotSeries {
  std::string label;
  std::string color;  // any SVG color string
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart: axes, tick labels, legend, one
/// polyline per series. With equal_axes the x and y scales share the
/// same meters-per-pixel factor (for path plots). Throws IoError when
/// the file cannot be written, ConfigError when a series is empty or
/// ragged.
void write_line_plot(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series, bool equal_axes = false);

}  // namespace parkmpc
