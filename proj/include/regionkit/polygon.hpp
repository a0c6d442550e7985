#pragma once

// Planar polyline and polygon utilities: orientation, winding numbers,
// segment intersection, indexed point location and arclength resampling.
// A "ring" is a closed polygon stored without repeating its first vertex.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "regionkit/state.hpp"

namespace regionkit {

using Polyline = std::vector<State>;

inline double signed_area(const Polyline& ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * twice;
}

inline double polyline_length(const Polyline& line) {
  double len = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) len += distance(line[i - 1], line[i]);
  return len;
}

/// Winding number of a closed curve about p (counterclockwise positive).
inline int winding_number(const Polyline& ring, State p) {
  int wn = 0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const State a = ring[i], b = ring[(i + 1) % n];
    const double side = cross(b - a, p - a);
    if (a.x2 <= p.x2) {
      if (b.x2 > p.x2 && side > 0.0) ++wn;
    } else if (b.x2 <= p.x2 && side < 0.0) {
      --wn;
    }
  }
  return wn;
}

inline double point_segment_distance(State p, State a, State b) {
  const State ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// Closed-segment intersection test (touching counts).
inline bool segments_intersect(State a, State b, State c, State d) {
  auto orient = [](State p, State q, State r) {
    const double v = cross(q - p, r - p);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](State p, State q, State r) {
    return std::min(p.x1, q.x1) <= r.x1 && r.x1 <= std::max(p.x1, q.x1) &&
           std::min(p.x2, q.x2) <= r.x2 && r.x2 <= std::max(p.x2, q.x2);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

/// First pair of non-adjacent ring edges that intersect, if any. Edges
/// sharing a vertex are exempt. Sweep over edges sorted by their left end.
inline std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(
    const Polyline& ring) {
  const std::size_t n = ring.size();
  if (n < 4) return std::nullopt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto xmin = [&](std::size_t i) { return std::min(ring[i].x1, ring[(i + 1) % n].x1); };
  auto xmax = [&](std::size_t i) { return std::max(ring[i].x1, ring[(i + 1) % n].x1); };
  std::sort(order.begin(), order.end(), [&](auto l, auto r) { return xmin(l) < xmin(r); });
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const double right = xmax(i);
    for (std::size_t m = k + 1; m < n && xmin(order[m]) <= right; ++m) {
      const std::size_t j = order[m];
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap <= 1 || gap == n - 1) continue;
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
        return std::pair{std::min(i, j), std::max(i, j)};
    }
  }
  return std::nullopt;
}

enum class Location { Inside, Outside, OnBoundary };

/// Uniform-grid index over the edges of a ring for fast point location.
class PolygonIndex {
 public:
  explicit PolygonIndex(Polyline ring, double boundary_tolerance = 1e-9)
      : ring_(std::move(ring)), tol_(boundary_tolerance) {
    lo_ = hi_ = ring_.front();
    for (State s : ring_) {
      lo_ = {std::min(lo_.x1, s.x1), std::min(lo_.x2, s.x2)};
      hi_ = {std::max(hi_.x1, s.x1), std::max(hi_.x2, s.x2)};
    }
    const auto cells = static_cast<std::size_t>(std::sqrt(static_cast<double>(ring_.size()))) + 1;
    nx_ = ny_ = std::clamp<std::size_t>(cells, 1, 512);
    cw_ = std::max((hi_.x1 - lo_.x1) / static_cast<double>(nx_), 1e-300);
    ch_ = std::max((hi_.x2 - lo_.x2) / static_cast<double>(ny_), 1e-300);
    cells_.resize(nx_ * ny_);
    rows_.resize(ny_);
    for (std::size_t i = 0, n = ring_.size(); i < n; ++i) {
      const State a = ring_[i], b = ring_[(i + 1) % n];
      const std::size_t ca = col(a.x1), cb = col(b.x1), ra = row(a.x2), rb = row(b.x2);
      const std::size_t cx0 = std::min(ca, cb), cx1 = std::max(ca, cb);
      const std::size_t cy0 = std::min(ra, rb), cy1 = std::max(ra, rb);
      for (std::size_t y = cy0; y <= cy1; ++y) {
        rows_[y].push_back(i);
        for (std::size_t x = cx0; x <= cx1; ++x) cells_[y * nx_ + x].push_back(i);
      }
    }
  }

  const Polyline& ring() const noexcept { return ring_; }

  Location locate(State p) const {
    if (p.x1 < lo_.x1 - tol_ || p.x1 > hi_.x1 + tol_ || p.x2 < lo_.x2 - tol_ ||
        p.x2 > hi_.x2 + tol_)
      return Location::Outside;
    const std::size_t n = ring_.size();
    for (std::size_t y = row(p.x2 - tol_); y <= row(p.x2 + tol_); ++y)
      for (std::size_t x = col(p.x1 - tol_); x <= col(p.x1 + tol_); ++x)
        for (std::size_t i : cells_[y * nx_ + x])
          if (point_segment_distance(p, ring_[i], ring_[(i + 1) % n]) <= tol_)
            return Location::OnBoundary;
    bool inside = false;
    for (std::size_t i : rows_[row(p.x2)]) {
      const State a = ring_[i], b = ring_[(i + 1) % n];
      if ((a.x2 > p.x2) != (b.x2 > p.x2)) {
        const double x = a.x1 + (p.x2 - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
        if (p.x1 < x) inside = !inside;
      }
    }
    return inside ? Location::Inside : Location::Outside;
  }

 private:
  std::size_t col(double x) const {
    const double c = std::floor((x - lo_.x1) / cw_);
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(nx_ - 1)));
  }
  std::size_t row(double y) const {
    const double r = std::floor((y - lo_.x2) / ch_);
    return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(ny_ - 1)));
  }

  Polyline ring_;
  double tol_;
  State lo_, hi_;
  std::size_t nx_ = 1, ny_ = 1;
  double cw_ = 1.0, ch_ = 1.0;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<std::vector<std::size_t>> rows_;
};

/// Point at arclength fraction u in [0, 1] along a polyline, with the index
/// of the edge it falls on.
inline std::pair<State, std::size_t> point_at_fraction(const Polyline& line, double u) {
  const double total = polyline_length(line);
  double target = std::clamp(u, 0.0, 1.0) * total;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const double len = distance(line[i - 1], line[i]);
    if (target <= len || i + 1 == line.size()) {
      const double t = len > 0.0 ? std::clamp(target / len, 0.0, 1.0) : 0.0;
      return {line[i - 1] + t * (line[i] - line[i - 1]), i - 1};
    }
    target -= len;
  }
  return {line.front(), 0};
}

/// segments + 1 points equally spaced in arclength; endpoints kept exactly.
inline Polyline resample_by_arclength(const Polyline& line, std::size_t segments) {
  segments = std::max<std::size_t>(segments, 1);
  std::vector<double> cumulative(line.size(), 0.0);
  for (std::size_t i = 1; i < line.size(); ++i)
    cumulative[i] = cumulative[i - 1] + distance(line[i - 1], line[i]);
  const double total = cumulative.back();
  Polyline out;
  out.reserve(segments + 1);
  out.push_back(line.front());
  std::size_t edge = 1;
  for (std::size_t k = 1; k < segments; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(segments);
    while (edge + 1 < line.size() && cumulative[edge] < target) ++edge;
    const double len = cumulative[edge] - cumulative[edge - 1];
    const double t = len > 0.0 ? (target - cumulative[edge - 1]) / len : 0.0;
    out.push_back(line[edge - 1] + t * (line[edge] - line[edge - 1]));
  }
  out.push_back(line.back());
  return out;
}

}  // namespace regionkit
