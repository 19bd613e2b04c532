// slamarm - minimal SVG line charts for offline trace inspection
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_SVGPLOT_HPP
#define SLAMARM_SVGPLOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace slamarm {

/// Polyline chart with axes, tick labels and a legend; deterministic output.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void add_series(std::string name, const std::vector<double>& x, const std::vector<double>& y) {
    series_.push_back({std::move(name), x, y});
  }

  std::string render(int width = 880, int height = 520) const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) {
      ymax = ymin + 1.0;
      ymin -= 1.0;
    }
    const double pad_y = 0.05 * (ymax - ymin);
    ymin -= pad_y;
    ymax += pad_y;

    const int ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += text(width / 2.0, 22, title_, 15, "middle");
    out += text(ml + pw / 2.0, height - 12, xlabel_, 12, "middle");
    out += "<g transform=\"rotate(-90 16 " + fmt(mt + ph / 2.0) + ")\">" +
           text(16, mt + ph / 2.0, ylabel_, 12, "middle") + "</g>\n";

    // frame and ticks
    out += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) +
           "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#404040\"/>\n";
    for (int k = 0; k <= 5; ++k) {
      const double xv = xmin + k * (xmax - xmin) / 5.0;
      const double yv = ymin + k * (ymax - ymin) / 5.0;
      out += line(px(xv), mt + ph, px(xv), mt + ph + 5, "#404040");
      out += text(px(xv), mt + ph + 18, fmt_tick(xv), 10, "middle");
      out += line(ml - 5, py(yv), ml, py(yv), "#404040");
      out += text(ml - 8, py(yv) + 3, fmt_tick(yv), 10, "end");
      out += line(ml, py(yv), ml + pw, py(yv), "#e0e0e0");
    }

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    for (size_t si = 0; si < series_.size(); ++si) {
      const auto& s = series_[si];
      std::string pts;
      bool pen_up = true;
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
          pen_up = true;
          continue;
        }
        pts += (pen_up ? "M" : "L");
        pts += fmt(px(s.x[i])) + " " + fmt(py(s.y[i]));
        pen_up = false;
      }
      out += "<path d=\"" + pts + "\" fill=\"none\" stroke=\"" +
             palette[si % 8] + "\" stroke-width=\"1.2\"/>\n";
      const double lx = ml + 10, ly = mt + 16 + 16.0 * si;
      out += line(lx, ly - 4, lx + 22, ly - 4, palette[si % 8]);
      out += text(lx + 28, ly, s.name, 11, "start");
    }
    out += "</svg>\n";
    return out;
  }

 private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
  };

  static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  }
  static std::string fmt_tick(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
  }
  static std::string text(double x, double y, const std::string& t, int size,
                          const std::string& anchor) {
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + t + "</text>\n";
  }
  static std::string line(double x1, double y1, double x2, double y2, const std::string& color) {
    return "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
           fmt(y2) + "\" stroke=\"" + color + "\"/>\n";
  }

  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
};

}  // namespace slamarm

#endif  // SLAMARM_SVGPLOT_HPP
