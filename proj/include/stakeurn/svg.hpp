#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "analytics.hpp"
#include "error.hpp"

namespace stakeurn {

struct HistogramOverlay {
  std::optional<BetaParams> beta;        // density curve
  std::optional<double> predicted_mean;  // vertical marker
  std::string title;
};

namespace detail {

inline std::string svg_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Standalone SVG of a [0,1] histogram normalized to a density, with an
/// optional Beta density polyline and a predicted-mean marker. The output
/// depends only on the inputs, so it can be compared textually.
inline std::string render_histogram_svg(const Histogram& hist, const HistogramOverlay& overlay = {}) {
  const std::uint64_t n = hist.total();
  if (hist.bins() == 0 || n == 0) throw Error(ErrorCode::EmptyHistogram, "histogram has no samples");

  constexpr double width = 640, height = 400;
  constexpr double left = 60, right = 20, top = 30, bottom = 50;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  constexpr int curve_points = 400;

  const double bin_w = 1.0 / static_cast<double>(hist.bins());
  std::vector<double> density(hist.bins());
  for (std::size_t k = 0; k < hist.bins(); ++k)
    density[k] = static_cast<double>(hist.counts[k]) / (static_cast<double>(n) * bin_w);
  // The Beta density diverges at the edges for a, b < 1, so the y range
  // follows the bars and the curve is clipped to it.
  const double ymax = *std::max_element(density.begin(), density.end()) * 1.1;

  auto px = [&](double x) { return left + x * plot_w; };
  auto py = [&](double y) { return top + plot_h - std::min(y, ymax) / ymax * plot_h; };
  using detail::svg_num;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(width) + "\" height=\"" + svg_num(height) +
       "\" viewBox=\"0 0 " + svg_num(width) + " " + svg_num(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!overlay.title.empty())
    s += "<text x=\"" + svg_num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         detail::xml_escape(overlay.title) + "</text>\n";

  s += "<g class=\"bars\" fill=\"steelblue\" stroke=\"none\">\n";
  for (std::size_t k = 0; k < hist.bins(); ++k) {
    const double x0 = px(hist.edges[k]), x1 = px(hist.edges[k + 1]);
    const double y = py(density[k]);
    s += "<rect x=\"" + svg_num(x0) + "\" y=\"" + svg_num(y) + "\" width=\"" + svg_num(x1 - x0) + "\" height=\"" +
         svg_num(top + plot_h - y) + "\"/>\n";
  }
  s += "</g>\n";

  if (overlay.beta) {
    s += "<polyline class=\"beta\" fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" points=\"";
    for (int i = 1; i < curve_points; ++i) {
      const double x = static_cast<double>(i) / curve_points;
      s += svg_num(px(x)) + "," + svg_num(py(beta_pdf(*overlay.beta, x))) + (i + 1 < curve_points ? " " : "");
    }
    s += "\"/>\n";
  }
  if (overlay.predicted_mean) {
    const double x = px(std::clamp(*overlay.predicted_mean, 0.0, 1.0));
    s += "<line class=\"mean\" x1=\"" + svg_num(x) + "\" y1=\"" + svg_num(top) + "\" x2=\"" + svg_num(x) +
         "\" y2=\"" + svg_num(top + plot_h) + "\" stroke=\"darkgreen\" stroke-dasharray=\"4 3\"/>\n";
  }

  // Axes with ticks every 0.1 on x.
  s += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  s += "<line x1=\"" + svg_num(left) + "\" y1=\"" + svg_num(top + plot_h) + "\" x2=\"" + svg_num(left + plot_w) +
       "\" y2=\"" + svg_num(top + plot_h) + "\"/>\n";
  s += "<line x1=\"" + svg_num(left) + "\" y1=\"" + svg_num(top) + "\" x2=\"" + svg_num(left) + "\" y2=\"" +
       svg_num(top + plot_h) + "\"/>\n";
  s += "</g>\n<g class=\"labels\" font-size=\"11\" text-anchor=\"middle\">\n";
  for (int t = 0; t <= 10; ++t) {
    const double x = px(t / 10.0);
    char label[8];
    std::snprintf(label, sizeof label, "%.1f", t / 10.0);
    s += "<text x=\"" + svg_num(x) + "\" y=\"" + svg_num(top + plot_h + 15) + "\">" + label + "</text>\n";
  }
  s += "<text x=\"" + svg_num(left + plot_w / 2) + "\" y=\"" + svg_num(height - 10) +
       "\">fractional stake</text>\n";
  s += "<text x=\"15\" y=\"" + svg_num(top + plot_h / 2) + "\" transform=\"rotate(-90 15 " +
       svg_num(top + plot_h / 2) + ")\">density (max " + svg_num(ymax / 1.1) + ")</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace stakeurn
