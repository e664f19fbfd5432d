#pragma once

#include <string>
#include <vector>

namespace d2dra {

// Minimal standalone SVG line chart: linear axes with ticks, one polyline per
// series, legend. Enough for the metric-versus-area-size figures.
struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
  int width = 640;
  int height = 440;
};

std::string render_svg_chart(const ChartSpec& spec);
void write_svg_chart(const ChartSpec& spec, const std::string& path);

}  // namespace d2dra
