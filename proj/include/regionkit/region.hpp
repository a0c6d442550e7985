#pragma once

// Assembly of the closed curve K = P2 A B [B1] C D E F P2 bounding a
// positively invariant region of the main field around the origin.

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regionkit/errors.hpp"
#include "regionkit/geometry.hpp"
#include "regionkit/integrator.hpp"
#include "regionkit/polygon.hpp"
#include "regionkit/system.hpp"

namespace regionkit {

enum class PieceKind {
  NullclineArc,
  Aux1Orbit,
  HorizontalSegment,
  CircleArc,
  VerticalSegment,
  SeparatrixArc
};

enum class Crossing { LeftToRight, RightToLeft, TopToBottom };

inline std::string_view to_string(PieceKind kind) {
  switch (kind) {
    case PieceKind::NullclineArc: return "NullclineArc";
    case PieceKind::Aux1Orbit: return "Aux1Orbit";
    case PieceKind::HorizontalSegment: return "HorizontalSegment";
    case PieceKind::CircleArc: return "CircleArc";
    case PieceKind::VerticalSegment: return "VerticalSegment";
    case PieceKind::SeparatrixArc: return "SeparatrixArc";
  }
  return "Unknown";
}

inline std::string_view to_string(Crossing crossing) {
  switch (crossing) {
    case Crossing::LeftToRight: return "LeftToRight";
    case Crossing::RightToLeft: return "RightToLeft";
    case Crossing::TopToBottom: return "TopToBottom";
  }
  return "Unknown";
}

struct CurvePiece {
  std::string name;  // "P2A", "AB", "BB1", "B1C" or "BC", "CD", "DE", "EF", "FP2"
  PieceKind kind;
  State start;
  State end;
  Polyline polyline;
  Crossing expected_crossing;
};

struct Vertices {
  State P2, A, B;
  std::optional<State> B1;
  State C, D, E, F;

  std::vector<std::pair<std::string, State>> named() const {
    std::vector<std::pair<std::string, State>> out{{"P2", P2}, {"A", A}, {"B", B}};
    if (B1) out.emplace_back("B1", *B1);
    out.insert(out.end(), {{"C", C}, {"D", D}, {"E", E}, {"F", F}});
    return out;
  }
};

/// Where E landed relative to the two admissibility conditions.
struct ConditionReport {
  bool e1_lower = false;  // -e < E.x1
  bool e1_upper = false;  // E.x1 <= -nu
  bool e2 = false;        // lower loop bound <= E.x2 < 0
  double e2_lower_bound = 0.0;

  bool condition1() const { return e1_lower && e1_upper; }
  bool all_hold() const { return condition1() && e2; }
};

struct InvariantRegion {
  Parameters params;
  Vertices vertices;
  std::vector<CurvePiece> pieces;
  Polyline polygon;  // ring, first vertex P2 not repeated
  bool case_eight_pieces = false;
  ConditionReport conditions;
};

struct BuildOptions {
  ToleranceSettings tolerances{};
  double t_max_piece = 100.0;
  std::size_t points_per_piece = 2000;
  /// Reject regions whose E violates E.x1 <= -nu instead of only recording it.
  bool strict_conditions = false;
};

/// Raised when E fails an admissibility condition; carries E and the bound.
class ConditionError : public Error {
 public:
  ConditionError(ErrorCode code, State e_point, double bound, const std::string& what)
      : Error(code, what), e_point_(e_point), bound_(bound) {}
  State e_point() const noexcept { return e_point_; }
  double bound() const noexcept { return bound_; }

 private:
  State e_point_;
  double bound_;
};

/// Guard of the line -x1 + alpha nu^2 x2 = 0 where the spiral field is horizontal.
inline double spiral_line_guard(const Parameters& p, State s) {
  return -s.x1 + p.alpha() * p.nu() * p.nu() * s.x2;
}

/// Concatenates piece polylines into a ring starting at the first piece start.
inline Polyline assemble_ring(const std::vector<CurvePiece>& pieces) {
  Polyline ring;
  for (const auto& piece : pieces) {
    const auto first = ring.empty() ? piece.polyline.begin() : piece.polyline.begin() + 1;
    ring.insert(ring.end(), first, piece.polyline.end());
  }
  if (ring.size() > 1 && distance(ring.front(), ring.back()) <= 1e-8) ring.pop_back();
  return ring;
}

namespace detail {

inline std::string describe(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline std::string describe(State s) { return "(" + describe(s.x1) + ", " + describe(s.x2) + ")"; }

inline Polyline orbit_polyline(const Trajectory& traj, State start, State end, std::size_t n) {
  Polyline line = traj.resample(std::max<std::size_t>(n, 2));
  line.front() = start;
  line.back() = end;
  return line;
}

inline CurvePiece segment(std::string name, PieceKind kind, State a, State b, Crossing crossing) {
  return {std::move(name), kind, a, b, {a, b}, crossing};
}

}  // namespace detail

/// Builds the boundary for p.
///
/// Order: corner A from the tangency polynomial; nullcline arc P2 -> A; spiral
/// orbit A -> B up to the line -x1 + alpha nu^2 x2 = 0; if B.x1 < nu a
/// horizontal segment B -> B1 = (nu, B.x2); circle arc to C on the positive
/// x1-axis; vertical segment C -> D down to the oblique asymptote; spiral orbit
/// D -> E back to the line; vertical segment E -> F onto the separatrix loop;
/// separatrix arc F -> P2.
///
/// Throws TangencyRootNotFound, EventNotReached, ConditionE1Violated,
/// ConditionE2Violated or SelfIntersectingBoundary.
inline InvariantRegion build_region(const Parameters& p, const BuildOptions& options = {}) {
  const std::size_t n = std::max<std::size_t>(options.points_per_piece, 2);
  const auto& tol = options.tolerances;
  const Aux1Field spiral{p};
  auto guard = [p](State s) { return spiral_line_guard(p, s); };

  InvariantRegion region{p, {}, {}, {}, false, {}};
  Vertices& v = region.vertices;
  auto& pieces = region.pieces;
  v.P2 = {-p.e(), 0.0};

  // Corner A and the nullcline arc.
  const double x10 = find_tangency_abscissa(p);
  v.A = {x10, nullcline_x2(p, x10)};
  {
    Polyline arc;
    arc.reserve(n);
    arc.push_back(v.P2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double x1 = -p.e() + (x10 + p.e()) * static_cast<double>(i) / static_cast<double>(n - 1);
      arc.push_back({x1, nullcline_x2(p, x1)});
    }
    arc.push_back(v.A);
    pieces.push_back({"P2A", PieceKind::NullclineArc, v.P2, v.A, std::move(arc), Crossing::LeftToRight});
  }

  // Spiral orbit A -> B.
  if (guard(v.A) == 0.0)
    throw Error(ErrorCode::DomainError, "corner A lies on the spiral line " + detail::describe(v.A));
  {
    auto run = integrate_until_event(spiral, v.A, {guard, Direction::Falling, true},
                                     options.t_max_piece, tol);
    v.B = run.hit;
    pieces.push_back({"AB", PieceKind::Aux1Orbit, v.A, v.B,
                      detail::orbit_polyline(run.trajectory, v.A, v.B, n), Crossing::LeftToRight});
  }

  // Circle arc to C, with the horizontal segment when B.x1 < nu.
  region.case_eight_pieces = v.B.x1 < p.nu();
  State arc_start = v.B;
  if (region.case_eight_pieces) {
    v.B1 = State{p.nu(), v.B.x2};
    pieces.push_back(detail::segment("BB1", PieceKind::HorizontalSegment, v.B, *v.B1,
                                     Crossing::TopToBottom));
    arc_start = *v.B1;
  }
  {
    const double radius = norm(arc_start);
    const double theta0 = std::atan2(arc_start.x2, arc_start.x1);
    v.C = {radius, 0.0};
    Polyline arc;
    arc.reserve(n);
    arc.push_back(arc_start);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double theta = theta0 * (1.0 - static_cast<double>(i) / static_cast<double>(n - 1));
      arc.push_back({radius * std::cos(theta), radius * std::sin(theta)});
    }
    arc.push_back(v.C);
    pieces.push_back({region.case_eight_pieces ? "B1C" : "BC", PieceKind::CircleArc, arc_start,
                      v.C, std::move(arc), Crossing::LeftToRight});
  }

  // Down to the oblique asymptote.
  v.D = {v.C.x1, oblique_asymptote_x2(p, v.C.x1)};
  pieces.push_back(detail::segment("CD", PieceKind::VerticalSegment, v.C, v.D, Crossing::RightToLeft));

  // Spiral orbit D -> E. The orbit meets the line from the right while
  // x2 < 0, so the first crossing in either direction is taken.
  if (!(guard(v.D) < 0.0))
    throw Error(ErrorCode::DomainError, "D is not strictly right of the spiral line " + detail::describe(v.D));
  {
    auto run = integrate_until_event(spiral, v.D, {guard, Direction::Either, true},
                                     options.t_max_piece, tol);
    v.E = run.hit;
    pieces.push_back({"DE", PieceKind::Aux1Orbit, v.D, v.E,
                      detail::orbit_polyline(run.trajectory, v.D, v.E, n), Crossing::RightToLeft});
  }

  ConditionReport& c = region.conditions;
  c.e1_lower = v.E.x1 > -p.e();
  c.e1_upper = v.E.x1 <= -p.nu();
  const double rhs = c.e1_lower ? separatrix_rhs(p, v.E.x1) : -1.0;
  c.e2_lower_bound = rhs >= -1e-14 ? separatrix_lower_x2(p, v.E.x1) : std::nan("");
  c.e2 = v.E.x2 < 0.0 && rhs >= -1e-14 && c.e2_lower_bound <= v.E.x2 + 1e-10;

  if (!c.e1_lower || (options.strict_conditions && !c.e1_upper)) {
    const double bound = c.e1_lower ? -p.nu() : -p.e();
    throw ConditionError(ErrorCode::ConditionE1Violated, v.E, bound,
                         "E = " + detail::describe(v.E) + " needs -e < x1 <= -nu (violated bound " +
                             detail::describe(bound) + ")");
  }
  if (!c.e2) {
    std::string why = v.E.x2 >= 0.0            ? "x2 < 0"
                      : !(rhs >= -1e-14)        ? "x1 inside the separatrix loop"
                                                : "x2 >= lower separatrix branch";
    throw ConditionError(ErrorCode::ConditionE2Violated, v.E, c.e2_lower_bound,
                         "E = " + detail::describe(v.E) + " violates " + why);
  }

  // F on the loop, the vertical segment E -> F and the separatrix arc.
  v.F = {v.E.x1, c.e2_lower_bound};
  if (distance(v.E, v.F) > 0.0)
    pieces.push_back(detail::segment("EF", PieceKind::VerticalSegment, v.E, v.F, Crossing::RightToLeft));
  {
    Polyline arc;
    arc.reserve(n);
    arc.push_back(v.F);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double x1 = v.F.x1 + (-p.e() - v.F.x1) * static_cast<double>(i) / static_cast<double>(n - 1);
      arc.push_back({x1, separatrix_lower_x2(p, x1)});
    }
    arc.push_back(v.P2);
    pieces.push_back({"FP2", PieceKind::SeparatrixArc, v.F, v.P2, std::move(arc), Crossing::RightToLeft});
  }

  region.polygon = assemble_ring(pieces);
  if (auto hit = find_self_intersection(region.polygon))
    throw Error(ErrorCode::SelfIntersectingBoundary,
                "boundary edges " + std::to_string(hit->first) + " and " +
                    std::to_string(hit->second) + " intersect");
  return region;
}

/// Strict interior / exterior / within 1e-9 of the boundary.
inline Location contains(const InvariantRegion& region, State s, double boundary_tolerance = 1e-9) {
  const auto& ring = region.polygon;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i)
    if (point_segment_distance(s, ring[i], ring[(i + 1) % n]) <= boundary_tolerance)
      return Location::OnBoundary;
  return winding_number(ring, s) != 0 ? Location::Inside : Location::Outside;
}

/// Ring resampled so that every edge is at most max_edge_length long; each
/// piece keeps its endpoints, so all named vertices survive.
inline Polyline polygon_of(const InvariantRegion& region, double max_edge_length) {
  if (!(max_edge_length > 0.0))
    throw Error(ErrorCode::InvalidArgument, "max_edge_length must be positive");
  std::vector<CurvePiece> resampled = region.pieces;
  for (auto& piece : resampled) {
    const double len = polyline_length(piece.polyline);
    const auto segments = static_cast<std::size_t>(std::ceil(len / max_edge_length));
    piece.polyline = resample_by_arclength(piece.polyline, std::max<std::size_t>(segments, 1));
  }
  return assemble_ring(resampled);
}

/// Copy of region with every point scaled about the origin.
inline InvariantRegion scaled_copy(const InvariantRegion& region, double factor) {
  InvariantRegion out = region;
  auto scale = [factor](State& s) { s = factor * s; };
  for (auto& piece : out.pieces) {
    scale(piece.start);
    scale(piece.end);
    for (auto& s : piece.polyline) scale(s);
  }
  for (auto& s : out.polygon) scale(s);
  Vertices& v = out.vertices;
  for (State* s : {&v.P2, &v.A, &v.B, &v.C, &v.D, &v.E, &v.F}) scale(*s);
  if (v.B1) scale(*v.B1);
  return out;
}

}  // namespace regionkit
