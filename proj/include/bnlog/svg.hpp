#pragma once

#include <algorithm>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "bnlog/radial.hpp"

namespace bnlog {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct SvgCanvas {
  std::string body;
  double x0, x1, y0, y1;
  static constexpr int W = 640, H = 420, ML = 60, MR = 20, MT = 20, MB = 45;

  double px(double x) const { return ML + (x - x0) / (x1 - x0) * (W - ML - MR); }
  double py(double y) const { return H - MB - (y - y0) / (y1 - y0) * (H - MT - MB); }

  void polyline(std::span<const double> xs, std::span<const double> ys, const std::string& color) {
    body += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      body += fmt(px(xs[i])) + "," + fmt(py(ys[i])) + " ";
    }
    body += "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor = "middle") {
    body += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"12\" font-family=\"monospace\" "
            "text-anchor=\"" + anchor + "\">" + s + "</text>\n";
  }

  std::string finish(const std::string& xlabel, const std::string& ylabel) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
                      "\" height=\"" + std::to_string(H) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    out += "<line x1=\"" + fmt(ML) + "\" y1=\"" + fmt(H - MB) + "\" x2=\"" + fmt(W - MR) + "\" y2=\"" +
           fmt(H - MB) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + fmt(ML) + "\" y1=\"" + fmt(MT) + "\" x2=\"" + fmt(ML) + "\" y2=\"" + fmt(H - MB) +
           "\" stroke=\"black\"/>\n";
    out += body;
    out += "<text x=\"" + fmt(0.5 * (ML + W - MR)) + "\" y=\"" + fmt(H - 10) +
           "\" font-size=\"13\" font-family=\"monospace\" text-anchor=\"middle\">" + xlabel + "</text>\n";
    out += "<text x=\"15\" y=\"" + fmt(0.5 * (MT + H - MB)) +
           "\" font-size=\"13\" font-family=\"monospace\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
           fmt(0.5 * (MT + H - MB)) + ")\">" + ylabel + "</text>\n";
    out += "</svg>\n";
    return out;
  }
};

inline const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

}  // namespace detail

/// Self-contained SVG of one or more radial profiles u(r).
inline std::string svg_profiles(const RadialGrid& g, std::span<const RadialField> fields,
                                std::span<const std::string> labels) {
  if (fields.empty()) throw std::invalid_argument("svg_profiles: need at least one profile");
  double ymin = 0.0, ymax = 0.0;
  for (const auto& f : fields) {
    for (double v : f.values) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (ymax == ymin) ymax = ymin + 1.0;
  detail::SvgCanvas c{.body = {}, .x0 = 0.0, .x1 = g.radius, .y0 = ymin, .y1 = ymax};
  for (std::size_t k = 0; k < fields.size(); ++k) {
    c.polyline(g.nodes, fields[k].values, detail::kColors[k % 4]);
    if (k < labels.size()) {
      c.text(detail::SvgCanvas::W - 110, 35 + 16 * static_cast<double>(k), labels[k], "start");
      c.body += "<line x1=\"" + detail::fmt(detail::SvgCanvas::W - 130) + "\" y1=\"" +
                detail::fmt(31 + 16 * static_cast<double>(k)) + "\" x2=\"" +
                detail::fmt(detail::SvgCanvas::W - 114) + "\" y2=\"" +
                detail::fmt(31 + 16 * static_cast<double>(k)) + "\" stroke=\"" +
                detail::kColors[k % 4] + "\" stroke-width=\"2\"/>\n";
    }
  }
  return c.finish("r", "u");
}

/// SVG of the path energies J(gamma(t_j)) against the path index.
inline std::string svg_path_energies(std::span<const double> energies) {
  if (energies.empty()) throw std::invalid_argument("svg_path_energies: empty input");
  std::vector<double> xs(energies.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  double ymin = energies[0], ymax = energies[0];
  for (double v : energies) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  if (ymax == ymin) ymax = ymin + 1.0;
  detail::SvgCanvas c{.body = {}, .x0 = 0.0, .x1 = static_cast<double>(xs.size() - 1), .y0 = ymin, .y1 = ymax};
  c.polyline(xs, energies, detail::kColors[0]);
  return c.finish("path index j", "J(gamma_j)");
}

}  // namespace bnlog
