#pragma once

// Self-contained SVG line charts of sweep tables. Output bytes depend only on
// the table and the options.

#include <filesystem>
#include <string>
#include <vector>

#include "swf/metrics.hpp"

namespace swf {

struct Series {
  std::string name;
  bool dotted = false;
  std::size_t color = 0;  // palette index
  std::vector<std::pair<double, double>> points;  // sorted by x
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  std::vector<Series> series;
};

struct PlotOptions {
  int width = 640;
  int height = 420;
};

std::string render_svg(const LineChart& chart, const PlotOptions& opts = {});

// One file per metric with at least one finite value. Learned series are
// solid and the truth baselines dotted; one color per noise level; x = n;
// values are averaged over repeats. Throws std::invalid_argument on an empty
// table.
std::vector<std::filesystem::path> emit_plots(const std::vector<MetricsRow>& rows,
                                              const std::filesystem::path& out_dir,
                                              const PlotOptions& opts = {});

// 1 - alpha against eta, one series per d, averaged over repeats and noise.
LineChart collapse_chart(const std::vector<MetricsRow>& rows, bool against_eta = true);

// collapse.svg (x = eta) and collapse_vs_n.svg in out_dir.
std::vector<std::filesystem::path> emit_collapse_plots(const std::vector<MetricsRow>& rows,
                                                       const std::filesystem::path& out_dir,
                                                       const PlotOptions& opts = {});

}  // namespace swf
