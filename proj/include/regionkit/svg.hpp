#pragma once

// Static SVG phase portrait: region boundary, nullclines, asymptotes,
// equilibria and overlaid trajectories.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "regionkit/geometry.hpp"
#include "regionkit/region.hpp"

namespace regionkit::svg {

struct PlotInput {
  const InvariantRegion* region = nullptr;
  std::vector<Polyline> trajectories;
  bool nullclines = true;
  int width = 900;
  int height = 650;
};

namespace detail {

struct Window {
  double x0, x1, y0, y1;
};

inline double nice_step(double span) {
  const double raw = span / 8.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

inline std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace detail

inline std::string phase_portrait(const PlotInput& input) {
  using detail::num;
  // Window: bounding box of the region (and of trajectories, capped at three
  // region extents), padded by 10% on every side.
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  auto grow = [&](State s) {
    x0 = std::min(x0, s.x1), x1 = std::max(x1, s.x1);
    y0 = std::min(y0, s.x2), y1 = std::max(y1, s.x2);
  };
  if (input.region)
    for (State s : input.region->polygon) grow(s);
  const double cap_w = x1 > x0 ? x1 - x0 : 1.0, cap_h = y1 > y0 ? y1 - y0 : 1.0;
  const detail::Window cap{x0 - cap_w, x1 + cap_w, y0 - cap_h, y1 + cap_h};
  const bool have_region = input.region != nullptr;
  for (const auto& traj : input.trajectories)
    for (State s : traj)
      if (!have_region || (s.x1 >= cap.x0 && s.x1 <= cap.x1 && s.x2 >= cap.y0 && s.x2 <= cap.y1))
        grow(s);
  if (!(x1 > x0)) x0 -= 1.0, x1 += 1.0;
  if (!(y1 > y0)) y0 -= 1.0, y1 += 1.0;
  const double mx = 0.1 * (x1 - x0), my = 0.1 * (y1 - y0);
  const detail::Window w{x0 - mx, x1 + mx, y0 - my, y1 + my};

  const double left = 70, right = 20, top = 20, bottom = 55;
  const double pw = input.width - left - right, ph = input.height - top - bottom;
  auto px = [&](double x) { return left + (x - w.x0) / (w.x1 - w.x0) * pw; };
  auto py = [&](double y) { return top + (w.y1 - y) / (w.y1 - w.y0) * ph; };
  auto path = [&](const Polyline& line, bool closed) {
    std::string d;
    for (std::size_t i = 0; i < line.size(); ++i)
      d += (i ? " L" : "M") + num(px(line[i].x1)) + "," + num(py(line[i].x2));
    if (closed) d += " Z";
    return d;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << input.width << "\" height=\""
     << input.height << "\" viewBox=\"0 0 " << input.width << " " << input.height << "\">\n";
  os << "<desc>window x1 [" << num(w.x0) << ", " << num(w.x1) << "], x2 [" << num(w.y0) << ", "
     << num(w.y1) << "]; auto-fitted with 10% margins</desc>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
     << "\" height=\"" << ph << "\"/></clipPath></defs>\n";

  // Frame, ticks and labels.
  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double sx = detail::nice_step(w.x1 - w.x0), sy = detail::nice_step(w.y1 - w.y0);
  for (double t = std::ceil(w.x0 / sx) * sx; t <= w.x1; t += sx)
    os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << top + ph << "\" x2=\"" << num(px(t))
       << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/><text x=\"" << num(px(t))
       << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << num(std::abs(t) < 1e-12 ? 0.0 : t)
       << "</text>\n";
  for (double t = std::ceil(w.y0 / sy) * sy; t <= w.y1; t += sy)
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << num(py(t)) << "\" x2=\"" << left << "\" y2=\""
       << num(py(t)) << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << num(py(t) + 4)
       << "\" text-anchor=\"end\">" << num(std::abs(t) < 1e-12 ? 0.0 : t) << "</text>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << input.height - 12
     << "\" text-anchor=\"middle\" font-size=\"15\">x1</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"15\" transform=\"rotate(-90 18 "
     << top + ph / 2 << ")\">x2</text>\n";
  os << "</g>\n<g clip-path=\"url(#plot)\" fill=\"none\">\n";

  if (input.region && input.nullclines) {
    const Parameters& p = input.region->params;
    // x1' = 0 on the x1-axis.
    os << "<path d=\"" << path({{w.x0, 0.0}, {w.x1, 0.0}}, false)
       << "\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n";
    // x2' = 0: three branches separated by the vertical asymptotes x1 = +-nu.
    const double lo_y = w.y0 - (w.y1 - w.y0), hi_y = w.y1 + (w.y1 - w.y0);
    const double edges[] = {w.x0, -p.nu(), p.nu(), w.x1};
    for (int b = 0; b < 3; ++b) {
      const double a = std::max(edges[b], w.x0), c = std::min(edges[b + 1], w.x1);
      if (!(c > a)) continue;
      Polyline branch;
      const int n = 1500;
      for (int i = 1; i < n; ++i) {
        const double x = a + (c - a) * i / n;
        if (std::abs(std::abs(x) - p.nu()) <= 1e-9) continue;
        const double y = nullcline_x2(p, x);
        if (y < lo_y || y > hi_y) {
          if (branch.size() > 1) os << "<path d=\"" << path(branch, false) << "\" stroke=\"#d62728\" stroke-width=\"1\"/>\n";
          branch.clear();
          continue;
        }
        branch.push_back({x, y});
      }
      if (branch.size() > 1) os << "<path d=\"" << path(branch, false) << "\" stroke=\"#d62728\" stroke-width=\"1\"/>\n";
    }
    os << "<path d=\"" << path({{w.x0, oblique_asymptote_x2(p, w.x0)}, {w.x1, oblique_asymptote_x2(p, w.x1)}}, false)
       << "\" stroke=\"#d62728\" stroke-width=\"0.8\" stroke-dasharray=\"6 4\"/>\n";
    for (double x : {-p.nu(), p.nu()})
      os << "<path d=\"" << path({{x, w.y0}, {x, w.y1}}, false)
         << "\" stroke=\"#d62728\" stroke-width=\"0.8\" stroke-dasharray=\"2 3\"/>\n";
  }

  const char* palette[] = {"#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  for (std::size_t k = 0; k < input.trajectories.size(); ++k)
    if (input.trajectories[k].size() > 1)
      os << "<path d=\"" << path(input.trajectories[k], false) << "\" stroke=\"" << palette[k % 8]
         << "\" stroke-width=\"0.9\"/>\n";

  if (input.region) {
    os << "<path d=\"" << path(input.region->polygon, true)
       << "\" stroke=\"black\" stroke-width=\"3\" stroke-linejoin=\"round\"/>\n";
  }
  os << "</g>\n";

  if (input.region) {
    const Parameters& p = input.region->params;
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    const char* eq_names[] = {"P1", "P2", "P3"};
    int k = 0;
    for (const auto& eq : equilibria(p)) {
      const double cx = px(eq.location.x1), cy = py(eq.location.x2);
      const bool stable = eq.kind == EquilibriumKind::StableFocus || eq.kind == EquilibriumKind::StableNode;
      if (eq.location.x1 >= w.x0 && eq.location.x1 <= w.x1)
        os << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"4\" stroke=\"black\" fill=\""
           << (stable ? "black" : "white") << "\"/><text x=\"" << num(cx + 6) << "\" y=\"" << num(cy + 16)
           << "\">" << eq_names[k] << "</text>\n";
      ++k;
    }
    for (const auto& [name, s] : input.region->vertices.named())
      if (name != "P2")
        os << "<text x=\"" << num(px(s.x1) + 5) << "\" y=\"" << num(py(s.x2) - 5) << "\" fill=\"#444\">" << name
           << "</text>\n";
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace regionkit::svg
