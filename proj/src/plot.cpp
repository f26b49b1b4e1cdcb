#include "swf/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "swf/io.hpp"

namespace swf {
namespace {

namespace fs = std::filesystem;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo == hi) {
      const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= d;
      hi += d;
    }
  }
};

std::vector<double> linear_ticks(const Range& r, int count) {
  std::vector<double> ticks;
  for (int k = 0; k < count; ++k) ticks.push_back(r.lo + (r.hi - r.lo) * k / (count - 1));
  return ticks;
}

struct MetricSpec {
  const char* name;
  const char* label;
  std::function<double(const MetricsRow&)> learned;
  std::function<double(const MetricsRow&)> truth;  // empty when there is no baseline
};

const std::vector<MetricSpec>& metric_specs() {
  static const std::vector<MetricSpec> specs = {
      {"test_loss", "test loss", [](const MetricsRow& r) { return r.test_loss; },
       [](const MetricsRow& r) { return r.truth_test_loss; }},
      {"noiseless_test_loss", "noiseless test loss",
       [](const MetricsRow& r) { return r.noiseless_test_loss; },
       [](const MetricsRow& r) { return r.truth_noiseless_test_loss; }},
      {"kl_weights", "KL(w* || w_hat)", [](const MetricsRow& r) { return r.kl_weights; }, {}},
      {"test_accuracy", "test accuracy", [](const MetricsRow& r) { return r.test_accuracy; },
       [](const MetricsRow& r) { return r.truth_test_accuracy; }},
      {"noiseless_test_accuracy", "noiseless test accuracy",
       [](const MetricsRow& r) { return r.noiseless_test_accuracy; },
       [](const MetricsRow& r) { return r.truth_noiseless_test_accuracy; }},
      {"p_hat", "learnt p", [](const MetricsRow& r) { return r.p_hat; },
       [](const MetricsRow& r) { return r.p_star; }},
      {"tau_hat", "learnt tau", [](const MetricsRow& r) { return r.tau_hat; },
       [](const MetricsRow& r) { return r.tau_star; }},
  };
  return specs;
}

// Mean over rows sharing (group, x); NaN values are skipped.
std::map<double, std::map<double, double>> grouped_means(
    const std::vector<MetricsRow>& rows, const std::function<double(const MetricsRow&)>& group,
    const std::function<double(const MetricsRow&)>& x,
    const std::function<double(const MetricsRow&)>& y) {
  std::map<double, std::map<double, std::pair<double, int>>> acc;
  for (const auto& r : rows) {
    const double v = y(r);
    if (!std::isfinite(v)) continue;
    auto& cell = acc[group(r)][x(r)];
    cell.first += v;
    ++cell.second;
  }
  std::map<double, std::map<double, double>> out;
  for (const auto& [g, by_x] : acc) {
    for (const auto& [xv, cell] : by_x) out[g][xv] = cell.first / cell.second;
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace

std::string render_svg(const LineChart& chart, const PlotOptions& opts) {
  Range xr;
  Range yr;
  for (const auto& s : chart.series) {
    for (const auto& [x, y] : s.points) {
      if (chart.log_x && !(x > 0.0)) throw std::invalid_argument("log axis needs x > 0");
      xr.add(chart.log_x ? std::log10(x) : x);
      yr.add(y);
    }
  }
  if (!(xr.lo <= xr.hi)) throw std::invalid_argument("chart has no points");
  xr.pad();
  yr.pad();

  const double w = opts.width;
  const double h = opts.height;
  const double plot_w = w - kMarginLeft - kMarginRight;
  const double plot_h = h - kMarginTop - kMarginBottom;
  auto px = [&](double x) {
    const double v = chart.log_x ? std::log10(x) : x;
    return kMarginLeft + (v - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  auto py = [&](double y) { return kMarginTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" +
         num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<text x=\"" + coord(kMarginLeft + plot_w / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-size=\"14\">" + escape(chart.title) + "</text>\n";
  svg += "<rect x=\"" + coord(kMarginLeft) + "\" y=\"" + coord(kMarginTop) + "\" width=\"" +
         coord(plot_w) + "\" height=\"" + coord(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : linear_ticks(xr, 5)) {
    const double xv = chart.log_x ? std::pow(10.0, t) : t;
    const double sx = px(xv);
    svg += "<line x1=\"" + coord(sx) + "\" y1=\"" + coord(kMarginTop + plot_h) + "\" x2=\"" +
           coord(sx) + "\" y2=\"" + coord(kMarginTop + plot_h + 4) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + coord(sx) + "\" y=\"" + coord(kMarginTop + plot_h + 17) +
           "\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
  }
  for (double t : linear_ticks(yr, 5)) {
    const double sy = py(t);
    svg += "<line x1=\"" + coord(kMarginLeft - 4) + "\" y1=\"" + coord(sy) + "\" x2=\"" +
           coord(kMarginLeft) + "\" y2=\"" + coord(sy) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + coord(kMarginLeft - 7) + "\" y=\"" + coord(sy + 4) +
           "\" text-anchor=\"end\">" + num(t) + "</text>\n";
  }
  svg += "<text x=\"" + coord(kMarginLeft + plot_w / 2) + "\" y=\"" + coord(h - 12) +
         "\" text-anchor=\"middle\">" + escape(chart.x_label) + "</text>\n";
  svg += "<text transform=\"translate(16," + coord(kMarginTop + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(chart.y_label) + "</text>\n";

  double legend_y = kMarginTop + 10;
  for (const auto& s : chart.series) {
    const std::string color = kPalette[s.color % std::size(kPalette)];
    const std::string dash = s.dotted ? " stroke-dasharray=\"2,3\"" : "";
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if (!pts.empty()) pts += ' ';
      pts += coord(px(x)) + "," + coord(py(y));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" + dash +
           " points=\"" + pts + "\"/>\n";
    for (const auto& [x, y] : s.points) {
      svg += "<circle cx=\"" + coord(px(x)) + "\" cy=\"" + coord(py(y)) + "\" r=\"2.5\" fill=\"" +
             color + "\"/>\n";
    }
    const double lx = kMarginLeft + plot_w + 10;
    svg += "<line x1=\"" + coord(lx) + "\" y1=\"" + coord(legend_y) + "\" x2=\"" +
           coord(lx + 22) + "\" y2=\"" + coord(legend_y) + "\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"" + dash + "/>\n";
    svg += "<text x=\"" + coord(lx + 27) + "\" y=\"" + coord(legend_y + 4) + "\">" +
           escape(s.name) + "</text>\n";
    legend_y += 16;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::vector<fs::path> emit_plots(const std::vector<MetricsRow>& rows, const fs::path& out_dir,
                                 const PlotOptions& opts) {
  if (rows.empty()) throw std::invalid_argument("empty metrics table");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir, ec.message());

  const auto by_noise = [](const MetricsRow& r) { return r.noise; };
  const auto by_n = [](const MetricsRow& r) { return static_cast<double>(r.n); };
  std::vector<fs::path> written;
  for (const auto& spec : metric_specs()) {
    const auto learned = grouped_means(rows, by_noise, by_n, spec.learned);
    if (learned.empty()) continue;
    const auto truth = spec.truth ? grouped_means(rows, by_noise, by_n, spec.truth)
                                  : std::map<double, std::map<double, double>>{};
    LineChart chart{std::string(spec.label) + " vs n", "n", spec.label, true, {}};
    std::size_t color = 0;
    for (const auto& [noise, points] : learned) {
      chart.series.push_back(
          {"noise " + num(noise), false, color, {points.begin(), points.end()}});
      if (auto it = truth.find(noise); it != truth.end()) {
        chart.series.push_back(
            {"truth " + num(noise), true, color, {it->second.begin(), it->second.end()}});
      }
      ++color;
    }
    const fs::path path = out_dir / (std::string(spec.name) + ".svg");
    write_text(path, render_svg(chart, opts));
    written.push_back(path);
  }
  return written;
}

LineChart collapse_chart(const std::vector<MetricsRow>& rows, bool against_eta) {
  if (rows.empty()) throw std::invalid_argument("empty metrics table");
  const auto curves = grouped_means(
      rows, [](const MetricsRow& r) { return static_cast<double>(r.d); },
      [against_eta](const MetricsRow& r) {
        return against_eta ? r.eta : static_cast<double>(r.n);
      },
      [](const MetricsRow& r) { return r.one_minus_alpha; });
  LineChart chart{against_eta ? "1 - alpha vs eta" : "1 - alpha vs n",
                  against_eta ? "eta = sqrt(n / (d ln n ln d))" : "n", "1 - alpha", true, {}};
  std::size_t color = 0;
  for (const auto& [d, points] : curves) {
    Series s{"d = " + num(d), false, color++, {}};
    for (const auto& [x, y] : points) {
      if (std::isfinite(x)) s.points.emplace_back(x, y);
    }
    if (!s.points.empty()) chart.series.push_back(std::move(s));
  }
  return chart;
}

std::vector<fs::path> emit_collapse_plots(const std::vector<MetricsRow>& rows,
                                          const fs::path& out_dir, const PlotOptions& opts) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir, ec.message());
  const fs::path eta_path = out_dir / "collapse.svg";
  const fs::path n_path = out_dir / "collapse_vs_n.svg";
  write_text(eta_path, render_svg(collapse_chart(rows, true), opts));
  write_text(n_path, render_svg(collapse_chart(rows, false), opts));
  return {eta_path, n_path};
}

}  // namespace swf
