#include <gtest/gtest.h>

#include "regionkit/verifier.hpp"

using namespace regionkit;

namespace {

const Parameters ref = Parameters::reference();
const Parameters feasible = Parameters::make(3.0, 0.3, 3.5, 4.0);

const InvariantRegion& reference_region() {
  static const InvariantRegion region = build_region(ref);
  return region;
}

const InvariantRegion& feasible_region() {
  static const InvariantRegion region = build_region(feasible);
  return region;
}

const CurvePiece& piece_named(const InvariantRegion& r, const std::string& name) {
  for (const auto& piece : r.pieces)
    if (piece.name == name) return piece;
  throw std::runtime_error("no piece " + name);
}

}  // namespace

TEST(InwardFlow, FeasibleRegionHasNoViolations) {
  for (std::size_t n : {1250u, 12500u}) {
    const InvarianceReport report = check_inward_flow(feasible_region(), feasible, n);
    EXPECT_TRUE(report.ok()) << report.violations.size() << " violations at " << n;
    EXPECT_LE(report.max_outward_component, 1e-9);
    EXPECT_EQ(report.samples_checked, n * feasible_region().pieces.size());
  }
}

TEST(InwardFlow, ReferenceViolationsSitOnSeparatrixRightOfMinusNu) {
  // With E right of -nu the damping is negative along part of FP2; the
  // outward component there is real, not a sampling artefact.
  const auto& r = reference_region();
  const InvarianceReport report = check_inward_flow(r, ref, 1250);
  ASSERT_FALSE(report.violations.empty());
  for (const auto& v : report.violations) {
    EXPECT_EQ(v.piece, "FP2");
    EXPECT_GT(v.at.x1, -ref.nu());
    EXPECT_LE(v.at.x1, r.vertices.E.x1 + 1e-12);
    // Independent evaluation: the separatrix normal is grad E, and the
    // outward flux equals alpha (x1^2 - nu^2) x2^2 / |grad E| > 0 only for |x1| < nu.
    EXPECT_LT(v.at.x1 * v.at.x1, ref.nu() * ref.nu());
  }
}

TEST(InwardFlow, EquilibriumOnBoundaryIsExempt) {
  const auto& r = reference_region();
  const InvarianceReport report = check_inward_flow(r, ref, 1250);
  bool saw_p2 = false;
  for (State s : report.exempt_points) saw_p2 |= distance(s, r.vertices.P2) <= 1e-6;
  EXPECT_TRUE(saw_p2);
}

TEST(InwardFlow, MidpointOfCdPointsInward) {
  const auto& r = reference_region();
  const State mid = 0.5 * (r.vertices.C + r.vertices.D);
  const State f = vector_field_main(ref, mid);
  EXPECT_LT(f.x1, 0.0);  // n_out = (+1, 0) on CD
}

TEST(InwardFlow, ShrunkPolygonFails) {
  const InvariantRegion small = scaled_copy(feasible_region(), 0.8);
  EXPECT_FALSE(check_inward_flow(small, feasible, 1250).ok());
}

TEST(Crossings, FeasibleRegionAllCorrect) {
  for (const auto& report : check_all_crossings(feasible_region(), feasible, 2000))
    EXPECT_TRUE(report.ok()) << report.piece << " wrong=" << report.wrong_sign;
}

TEST(Crossings, ReferencePieces) {
  const auto& r = reference_region();
  const State ex[] = {r.vertices.P2, r.vertices.A};
  const auto p2a = check_crossing_direction(piece_named(r, "P2A"), ref, 2000, ex);
  EXPECT_TRUE(p2a.ok());
  EXPECT_GE(p2a.exempt, 1u);
  EXPECT_TRUE(check_crossing_direction(piece_named(r, "BB1"), ref, 2000, ex).ok());
  EXPECT_TRUE(check_crossing_direction(piece_named(r, "EF"), ref, 2000, ex).ok());
  EXPECT_TRUE(check_crossing_direction(piece_named(r, "AB"), ref, 2000, ex).ok());
  EXPECT_GT(check_crossing_direction(piece_named(r, "BB1"), ref, 2000, ex).min_margin, 0.0);
}

TEST(Containment, BoundaryOrbitsStayInside) {
  const auto& r = feasible_region();
  const auto starts = boundary_start_points(r, 6);
  ASSERT_EQ(starts.size(), 6u);
  const ContainmentReport report = check_containment_by_simulation(r, feasible, starts, 200.0);
  EXPECT_TRUE(report.ok());
  const PolygonIndex index(r.polygon);
  for (State s : report.starts) EXPECT_EQ(index.locate(s), Location::Inside);
}

TEST(Containment, OriginStaysInside) {
  const State origin_ish[] = {{1e-3, 0.0}};
  EXPECT_TRUE(check_containment_by_simulation(reference_region(), ref, origin_ish, 200.0).ok());
}

TEST(Containment, ShrunkPolygonLetsOrbitsOut) {
  const InvariantRegion small = scaled_copy(feasible_region(), 0.8);
  const auto starts = boundary_start_points(small, 6);
  EXPECT_FALSE(check_containment_by_simulation(small, feasible, starts, 200.0).escapes.empty());
}

TEST(LimitCycle, ConvergesWithWindingOne) {
  const PeriodicOrbit orbit = find_limit_cycle(ref, {0.1, 0});
  EXPECT_LE(orbit.last_return_difference, 1e-9);
  EXPECT_EQ(orbit.winding_number, 1);
  EXPECT_GT(orbit.period, 0.0);
  EXPECT_LE(orbit.closure_error, 1e-7);
  EXPECT_NEAR(orbit.section_point.x2, 0.0, 1e-10);
  EXPECT_GT(orbit.section_point.x1, 0.0);
  // Closure by an independent re-integration over one period.
  const State back = integrate(MainField{ref}, orbit.section_point, {0.0, orbit.period}).back().state;
  EXPECT_LE(distance(back, orbit.section_point), 1e-7);
}

TEST(LimitCycle, SeedsFromBothSidesAgreeAndApproachMonotonically) {
  const auto& r = reference_region();
  const PeriodicOrbit inner = find_limit_cycle(ref, {0.1, 0});
  const PeriodicOrbit outer = find_limit_cycle(ref, {0.95 * r.vertices.C.x1, 0});
  EXPECT_NEAR(inner.section_point.x1, outer.section_point.x1, 1e-6);
  for (std::size_t i = 1; i < inner.section_abscissas.size(); ++i)
    EXPECT_GE(inner.section_abscissas[i], inner.section_abscissas[i - 1] - 1e-12);
  for (std::size_t i = 1; i < outer.section_abscissas.size(); ++i)
    EXPECT_LE(outer.section_abscissas[i], outer.section_abscissas[i - 1] + 1e-12);
}

TEST(LimitCycle, PolylineInsideRegion) {
  const PeriodicOrbit orbit = find_limit_cycle(ref, {0.1, 0});
  const PolygonIndex index(reference_region().polygon);
  for (State s : orbit.polyline) EXPECT_EQ(index.locate(s), Location::Inside);
}

TEST(LimitCycle, EquilibriumSeedRejected) {
  try {
    find_limit_cycle(ref, {0, 0});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::InvalidArgument);
  }
}

TEST(LimitCycle, TooFewReturnsIsNoConvergence) {
  LimitCycleSettings settings;
  settings.max_returns = 3;
  try {
    find_limit_cycle(ref, {0.1, 0}, settings);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NoConvergence);
  }
}
