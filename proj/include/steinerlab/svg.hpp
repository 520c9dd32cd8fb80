#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "steinerlab/local_min.hpp"

namespace steinerlab {

struct RenderSpec {
  int width = 640;
  int height = 640;
  double stroke_width = 2.0;
  double point_radius = 4.0;
  bool labels = true;
  int frame = -1;  // for paths: a single frame index, or all when negative
};

namespace svgdetail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// deterministic palette keyed by a signature hash
inline std::string color_for(const std::string& sig) {
  static const char* palette[] = {"#1f6f8b", "#c44536", "#3a7d44", "#7d3ac1",
                                  "#b8860b", "#246a73", "#a23e48", "#4b6043"};
  unsigned h = 2166136261u;
  for (char c : sig) h = (h ^ static_cast<unsigned char>(c)) * 16777619u;
  return palette[h % 8];
}

struct Frame {
  double min_x = 0, min_y = 0, scale = 1, height = 0, margin = 0;
  double x(double v) const { return (v - min_x) * scale + margin; }
  // mathematical y-up convention: flip into SVG's y-down space
  double y(double v) const { return height - ((v - min_y) * scale + margin); }
};

inline Frame fit_frame(const std::vector<const Configuration*>& configs,
                       const RenderSpec& spec) {
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const Configuration* c : configs)
    for (const Vec& p : c->points) {
      min_x = std::min(min_x, p[0]);
      max_x = std::max(max_x, p[0]);
      min_y = std::min(min_y, p[1]);
      max_y = std::max(max_y, p[1]);
    }
  Frame f;
  const double span_x = std::max(max_x - min_x, 1e-9);
  const double span_y = std::max(max_y - min_y, 1e-9);
  f.margin = 0.05 * std::min(spec.width, spec.height);
  f.scale = std::min((spec.width - 2 * f.margin) / span_x,
                     (spec.height - 2 * f.margin) / span_y);
  f.min_x = min_x;
  f.min_y = min_y;
  f.height = spec.height;
  return f;
}

}  // namespace svgdetail

// Renders a configuration with zero or more networks laid over it.  Planar
// only; the caller projects higher-dimensional data first.
inline std::string render_networks_svg(const Configuration& config,
                                       const std::vector<Network>& networks,
                                       const std::vector<std::string>& names,
                                       const RenderSpec& spec = {}) {
  if (config.dim != 2) throw std::invalid_argument("svg rendering needs d=2");
  using svgdetail::fmt;
  svgdetail::Frame fr = svgdetail::fit_frame({&config}, spec);
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(spec.width) + "\" height=\"" + std::to_string(spec.height) +
         "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < networks.size(); ++k) {
    const Network& net = networks[k];
    const std::string color =
        svgdetail::color_for(k < names.size() ? names[k] : std::to_string(k));
    const std::string dash = k % 2 == 1 ? " stroke-dasharray=\"6,4\"" : "";
    for (auto [a, b] : net.topology.edges) {
      const Vec& pa = net.position(a);
      const Vec& pb = net.position(b);
      out += "<line x1=\"" + fmt(fr.x(pa[0])) + "\" y1=\"" + fmt(fr.y(pa[1])) +
             "\" x2=\"" + fmt(fr.x(pb[0])) + "\" y2=\"" + fmt(fr.y(pb[1])) +
             "\" stroke=\"" + color + "\" stroke-width=\"" +
             fmt(spec.stroke_width) + "\"" + dash + "/>\n";
    }
    for (const Vec& q : net.interior_positions)
      out += "<circle cx=\"" + fmt(fr.x(q[0])) + "\" cy=\"" + fmt(fr.y(q[1])) +
             "\" r=\"" + fmt(0.6 * spec.point_radius) + "\" fill=\"" + color +
             "\"/>\n";
  }
  for (int i = 0; i < config.size(); ++i) {
    const Vec& p = config.points[i];
    out += "<circle cx=\"" + fmt(fr.x(p[0])) + "\" cy=\"" + fmt(fr.y(p[1])) +
           "\" r=\"" + fmt(spec.point_radius) + "\" fill=\"black\"/>\n";
    if (spec.labels)
      out += "<text x=\"" + fmt(fr.x(p[0]) + 1.8 * spec.point_radius) + "\" y=\"" +
             fmt(fr.y(p[1]) - 1.8 * spec.point_radius) +
             "\" font-family=\"sans-serif\" font-size=\"14\">t" +
             std::to_string(i + 1) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// Side-by-side panels, one per (title, configuration, networks) entry.
inline std::string render_panels_svg(
    const std::vector<std::string>& titles,
    const std::vector<Configuration>& configs,
    const std::vector<std::vector<Network>>& panel_networks,
    const RenderSpec& spec = {}) {
  const int count = static_cast<int>(configs.size());
  if (count == 0) throw std::invalid_argument("no panels to render");
  RenderSpec one = spec;
  one.width = spec.width;
  one.height = spec.height;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(spec.width * count) + "\" height=\"" +
         std::to_string(spec.height + 24) + "\">\n";
  for (int i = 0; i < count; ++i) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < panel_networks[i].size(); ++k)
      names.push_back(titles[i] + "#" + std::to_string(k));
    std::string inner = render_networks_svg(configs[i], panel_networks[i], names, one);
    // strip the outer svg element and nest the body in a translated group
    const std::size_t open = inner.find(">\n");
    const std::size_t close = inner.rfind("</svg>");
    out += "<g transform=\"translate(" + std::to_string(spec.width * i) + ",24)\">\n";
    out += inner.substr(open + 2, close - open - 2);
    out += "</g>\n";
    out += "<text x=\"" + std::to_string(spec.width * i + 12) +
           "\" y=\"16\" font-family=\"sans-serif\" font-size=\"14\">" + titles[i] +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace steinerlab
