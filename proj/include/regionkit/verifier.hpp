#pragma once

// Numerical certificates for a built region: sign of the main field against
// the outward normal along the boundary, per-piece crossing directions,
// containment of simulated orbits, and location of the enclosed limit cycle
// through a Poincare return map on the positive x1-axis.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "regionkit/errors.hpp"
#include "regionkit/geometry.hpp"
#include "regionkit/integrator.hpp"
#include "regionkit/polygon.hpp"
#include "regionkit/region.hpp"
#include "regionkit/system.hpp"

namespace regionkit {

struct FlowViolation {
  std::string piece;
  State at;
  double outward;  // f . n_out
};

struct InvarianceReport {
  std::size_t samples_checked = 0;
  double max_outward_component = -std::numeric_limits<double>::infinity();
  std::vector<FlowViolation> violations;
  std::vector<State> exempt_points;

  bool ok() const { return violations.empty(); }
};

struct VerifierSettings {
  double outward_tolerance = 1e-9;  // relative to max(1, |f|)
  double exemption_radius = 1e-6;
  double alignment_angle = 0.05;  // rad; generator tangent vs polyline edge
};

namespace detail {

struct BoundarySample {
  State at;
  State chord;  // unit direction of the polyline edge holding the sample
};

/// count >= 2 samples equally spaced in arclength, endpoints included.
inline std::vector<BoundarySample> sample_polyline(const Polyline& line, std::size_t count) {
  count = std::max<std::size_t>(count, 2);
  std::vector<double> cumulative(line.size(), 0.0);
  for (std::size_t i = 1; i < line.size(); ++i)
    cumulative[i] = cumulative[i - 1] + distance(line[i - 1], line[i]);
  const double total = cumulative.back();
  std::vector<BoundarySample> out;
  out.reserve(count);
  std::size_t edge = 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (edge + 1 < line.size() && cumulative[edge] < target) ++edge;
    const State a = line[edge - 1], b = line[edge];
    const double len = cumulative[edge] - cumulative[edge - 1];
    const double t = len > 0.0 ? std::clamp((target - cumulative[edge - 1]) / len, 0.0, 1.0) : 0.0;
    const State at = k + 1 == count ? line.back() : a + t * (b - a);
    out.push_back({at, len > 0.0 ? (1.0 / len) * (b - a) : State{}});
  }
  return out;
}

/// Unit tangent of the curve a piece was generated from, oriented along the
/// polyline; falls back to the edge chord where the polyline does not follow
/// the generator (deformed or hand-edited boundaries).
inline State boundary_tangent(const CurvePiece& piece, const Parameters& p,
                              const BoundarySample& sample, double max_angle) {
  State gen{};
  bool oriented = false;
  switch (piece.kind) {
    case PieceKind::Aux1Orbit: gen = vector_field_aux1(p, sample.at); break;
    case PieceKind::CircleArc: gen = vector_field_aux2(sample.at); break;
    case PieceKind::SeparatrixArc: gen = vector_field_conservative(p, sample.at); break;
    case PieceKind::NullclineArc: {
      const State g = nullcline_gradient(p, sample.at);
      gen = {-g.x2, g.x1};
      oriented = true;
      break;
    }
    case PieceKind::HorizontalSegment:
    case PieceKind::VerticalSegment: return sample.chord;
  }
  const double len = norm(gen);
  if (len == 0.0) return sample.chord;
  gen = (1.0 / len) * gen;
  if (oriented && dot(gen, sample.chord) < 0.0) gen = -1.0 * gen;
  return dot(gen, sample.chord) >= std::cos(max_angle) ? gen : sample.chord;
}

inline State outward_normal(State tangent, bool counterclockwise) {
  return counterclockwise ? State{tangent.x2, -tangent.x1} : State{-tangent.x2, tangent.x1};
}

inline bool exempt(const InvariantRegion& region, const CurvePiece& piece, State s, double radius) {
  if (distance(s, region.vertices.P2) <= radius || distance(s, region.vertices.A) <= radius)
    return true;
  return piece.name == "AB" && std::abs(s.x1) <= radius;
}

}  // namespace detail

/// Evaluates f . n_out of the main field at samples_per_piece points of every
/// piece. Orientation comes from the sign of the ring's area; samples within
/// the exemption radius of P2, A, or of x1 = 0 on AB are skipped.
inline InvarianceReport check_inward_flow(const InvariantRegion& region, const Parameters& p,
                                          std::size_t samples_per_piece,
                                          const VerifierSettings& settings = {}) {
  InvarianceReport report;
  const bool ccw = signed_area(region.polygon) > 0.0;
  for (const auto& piece : region.pieces) {
    for (const auto& sample : detail::sample_polyline(piece.polyline, samples_per_piece)) {
      ++report.samples_checked;
      if (detail::exempt(region, piece, sample.at, settings.exemption_radius)) {
        report.exempt_points.push_back(sample.at);
        continue;
      }
      const State tangent = detail::boundary_tangent(piece, p, sample, settings.alignment_angle);
      const State f = vector_field_main(p, sample.at);
      const double outward = dot(f, detail::outward_normal(tangent, ccw));
      report.max_outward_component = std::max(report.max_outward_component, outward);
      if (outward > settings.outward_tolerance * std::max(1.0, norm(f)))
        report.violations.push_back({piece.name, sample.at, outward});
    }
  }
  return report;
}

struct CrossingReport {
  std::string piece;
  Crossing expected;
  std::size_t samples = 0;
  std::size_t exempt = 0;
  std::size_t wrong_sign = 0;
  double min_margin = std::numeric_limits<double>::infinity();  // signed along expected

  bool ok() const { return wrong_sign == 0; }
};

/// Checks the sign of f1 (LeftToRight, RightToLeft) or f2 (TopToBottom) of the
/// main field along one piece. Points within the exemption radius of
/// `exempt_points` are skipped, as is x1 = 0 on AB.
inline CrossingReport check_crossing_direction(const CurvePiece& piece, const Parameters& p,
                                               std::size_t samples,
                                               std::span<const State> exempt_points = {},
                                               const VerifierSettings& settings = {}) {
  CrossingReport report{piece.name, piece.expected_crossing};
  for (const auto& sample : detail::sample_polyline(piece.polyline, samples)) {
    ++report.samples;
    const bool near_vertex = std::any_of(exempt_points.begin(), exempt_points.end(), [&](State c) {
      return distance(c, sample.at) <= settings.exemption_radius;
    });
    if (near_vertex || (piece.name == "AB" && std::abs(sample.at.x1) <= settings.exemption_radius)) {
      ++report.exempt;
      continue;
    }
    const State f = vector_field_main(p, sample.at);
    double margin = 0.0;
    switch (piece.expected_crossing) {
      case Crossing::LeftToRight: margin = f.x1; break;
      case Crossing::RightToLeft: margin = -f.x1; break;
      case Crossing::TopToBottom: margin = -f.x2; break;
    }
    report.min_margin = std::min(report.min_margin, margin);
    if (margin < -settings.outward_tolerance * std::max(1.0, norm(f))) ++report.wrong_sign;
  }
  return report;
}

inline std::vector<CrossingReport> check_all_crossings(const InvariantRegion& region,
                                                       const Parameters& p, std::size_t samples,
                                                       const VerifierSettings& settings = {}) {
  const State exempt[] = {region.vertices.P2, region.vertices.A};
  std::vector<CrossingReport> out;
  for (const auto& piece : region.pieces)
    out.push_back(check_crossing_direction(piece, p, samples, exempt, settings));
  return out;
}

/// count points on the boundary at arclength fractions (k + 1/2) / count.
inline std::vector<State> boundary_start_points(const InvariantRegion& region, std::size_t count) {
  Polyline closed = region.polygon;
  closed.push_back(closed.front());
  std::vector<State> out;
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(point_at_fraction(closed, (static_cast<double>(k) + 0.5) / static_cast<double>(count)).first);
  return out;
}

/// Moves a point 'by' along the inward normal of the nearest ring edge.
inline State nudge_inward(const Polyline& ring, State s, double by) {
  const bool ccw = signed_area(ring) > 0.0;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const double dist = point_segment_distance(s, ring[i], ring[(i + 1) % n]);
    if (dist < best_d) best_d = dist, best = i;
  }
  const State edge = ring[(best + 1) % ring.size()] - ring[best];
  const State outward = detail::outward_normal((1.0 / norm(edge)) * edge, ccw);
  return s - by * outward;
}

struct Escape {
  std::size_t orbit;
  double t;
  State at;
};

struct ContainmentReport {
  std::vector<State> starts;  // after nudging
  std::vector<Trajectory> trajectories;
  std::vector<Escape> escapes;  // first escape per orbit
  std::vector<std::string> failures;

  bool ok() const { return escapes.empty() && failures.empty(); }
};

/// Integrates the main field from each initial point over [0, horizon] and
/// tests every accepted step against the region. Boundary points are first
/// nudged 1e-6 inward; points outside are reported as escapes at t = 0.
inline ContainmentReport check_containment_by_simulation(const InvariantRegion& region,
                                                         const Parameters& p,
                                                         std::span<const State> initial_points,
                                                         double horizon,
                                                         const ToleranceSettings& tol = {},
                                                         double nudge = 1e-6) {
  ContainmentReport report;
  const PolygonIndex index(region.polygon, 1e-9);
  for (std::size_t k = 0; k < initial_points.size(); ++k) {
    State s0 = initial_points[k];
    if (index.locate(s0) == Location::OnBoundary) s0 = nudge_inward(region.polygon, s0, nudge);
    report.starts.push_back(s0);
    if (index.locate(s0) == Location::Outside) {
      report.escapes.push_back({k, 0.0, s0});
      report.trajectories.emplace_back("main");
      continue;
    }
    auto run = integrate_partial(MainField{p}, s0, {0.0, horizon}, tol, {}, "main");
    if (run.status != IntegrationStatus::Completed)
      report.failures.push_back("orbit " + std::to_string(k) + ": integration failed");
    for (const auto& sample : run.trajectory.samples()) {
      if (index.locate(sample.state) == Location::Outside) {
        report.escapes.push_back({k, sample.t, sample.state});
        break;
      }
    }
    report.trajectories.push_back(std::move(run.trajectory));
  }
  return report;
}

struct PeriodicOrbit {
  double period = 0.0;
  State section_point;
  Polyline polyline;
  std::size_t returns_used = 0;
  std::vector<double> section_abscissas;  // successive crossings, seed's first hit first
  double last_return_difference = 0.0;
  double closure_error = 0.0;
  int winding_number = 0;  // about the origin, counted along the motion
};

struct LimitCycleSettings {
  double tolerance = 1e-9;
  std::size_t max_returns = 500;
  double t_max_return = 1000.0;
  std::size_t polyline_points = 4000;
  ToleranceSettings integration{};
};

/// Guard of the section {x2 = 0}; crossings with x1 > 0 in the Falling
/// direction are the returns of the clockwise flow.
inline EventSpec section_event(bool terminal = true) {
  return {[](State s) { return s.x2; }, Direction::Falling, terminal};
}

/// Next crossing of {x2 = 0, x1 > 0} from s, with the elapsed time.
inline std::pair<State, double> next_section_return(const Parameters& p, State s,
                                                    const LimitCycleSettings& settings) {
  double elapsed = 0.0;
  for (int attempt = 0; attempt < 16; ++attempt) {
    EventResult run = [&] {
      try {
        return integrate_until_event(MainField{p}, s, section_event(), settings.t_max_return,
                                     settings.integration);
      } catch (const Error& err) {
        if (err.code() == ErrorCode::EventNotReached)
          throw Error(ErrorCode::SectionNeverHit, "orbit never returned to {x2 = 0, x1 > 0}");
        throw;
      }
    }();
    elapsed += run.t_hit;
    if (run.hit.x1 > 0.0) return {run.hit, elapsed};
    s = run.hit;
  }
  throw Error(ErrorCode::SectionNeverHit, "section crossings stay at x1 <= 0");
}

/// Iterates the return map from seed until successive abscissas agree within
/// settings.tolerance, then integrates one more loop for the period and polyline.
inline PeriodicOrbit find_limit_cycle(const Parameters& p, State seed,
                                      const LimitCycleSettings& settings = {}) {
  if (!is_finite(seed)) throw Error(ErrorCode::NonFiniteState, "seed is not finite");
  for (const auto& eq : equilibria(p))
    if (distance(seed, eq.location) <= 1e-12)
      throw Error(ErrorCode::InvalidArgument, "seed is an equilibrium");

  PeriodicOrbit orbit;
  State current = next_section_return(p, seed, settings).first;
  orbit.section_abscissas.push_back(current.x1);
  bool converged = false;
  for (std::size_t k = 0; k < settings.max_returns; ++k) {
    const State next = next_section_return(p, current, settings).first;
    orbit.section_abscissas.push_back(next.x1);
    orbit.returns_used = k + 1;
    orbit.last_return_difference = std::abs(next.x1 - current.x1);
    current = next;
    if (orbit.last_return_difference <= settings.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw Error(ErrorCode::NoConvergence,
                "return map did not settle within " + std::to_string(settings.max_returns) +
                    " returns (last difference " + std::to_string(orbit.last_return_difference) + ")");

  orbit.section_point = current;
  auto loop = integrate_until_event(MainField{p}, current, section_event(), settings.t_max_return,
                                    settings.integration);
  orbit.period = loop.t_hit;
  orbit.closure_error = distance(loop.hit, current);
  orbit.polyline = loop.trajectory.resample(std::max<std::size_t>(settings.polyline_points, 3));
  orbit.polyline.pop_back();  // closes onto the first point
  orbit.winding_number = std::abs(winding_number(orbit.polyline, State{0.0, 0.0}));
  return orbit;
}

/// Crossings of {x2 = 0, x1 > 0} (Falling) along the main flow over [0, horizon].
inline std::vector<EventHit> section_crossings(const Parameters& p, State s0, double horizon,
                                               const ToleranceSettings& tol = {}) {
  const EventSpec section = section_event(false);
  auto run = integrate_partial(MainField{p}, s0, {0.0, horizon}, tol, std::span(&section, 1), "main");
  detail::raise_on_failure(run.status, "integration failed");
  std::erase_if(run.hits, [](const EventHit& h) { return !(h.state.x1 > 0.0); });
  return run.hits;
}

}  // namespace regionkit
