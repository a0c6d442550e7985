#pragma once

#include <cmath>

namespace regionkit {

/// A point (x1, x2) = (position, velocity) of the phase plane.
struct State {
  double x1 = 0.0;
  double x2 = 0.0;

  friend constexpr bool operator==(const State&, const State&) = default;
};

constexpr State operator+(State a, State b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
constexpr State operator-(State a, State b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
constexpr State operator*(double k, State a) { return {k * a.x1, k * a.x2}; }
constexpr State operator*(State a, double k) { return {k * a.x1, k * a.x2}; }

constexpr double dot(State a, State b) { return a.x1 * b.x1 + a.x2 * b.x2; }
constexpr double cross(State a, State b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(State a) { return std::hypot(a.x1, a.x2); }
inline double distance(State a, State b) { return norm(a - b); }
inline bool is_finite(State a) { return std::isfinite(a.x1) && std::isfinite(a.x2); }

}  // namespace regionkit
