#include <gtest/gtest.h>

#include "regionkit/region.hpp"

using namespace regionkit;

namespace {

const Parameters ref = Parameters::reference();

const InvariantRegion& reference_region() {
  static const InvariantRegion region = build_region(ref);
  return region;
}

ErrorCode build_error(const Parameters& p, BuildOptions opts = {}) {
  try {
    build_region(p, opts);
  } catch (const Error& err) {
    return err.code();
  }
  ADD_FAILURE() << "build succeeded";
  return ErrorCode::Io;
}

}  // namespace

TEST(BuildRegion, ReferenceVertices) {
  const auto& r = reference_region();
  const auto& v = r.vertices;
  EXPECT_EQ(v.P2, (State{-3.5, 0}));
  EXPECT_GT(v.A.x1, -3.5);
  EXPECT_LT(v.A.x1, -0.1);
  EXPECT_NEAR(v.A.x1, -0.962095951555, 1e-9);
  EXPECT_NEAR(std::abs(-v.B.x1 + 1.5 * 0.01 * v.B.x2), 0.0, 1e-10);
  EXPECT_GT(v.C.x1, 0.0);
  EXPECT_EQ(v.C.x2, 0.0);
  EXPECT_EQ(v.D.x1, v.C.x1);
  EXPECT_EQ(v.D.x2, oblique_asymptote_x2(ref, v.C.x1));
  EXPECT_EQ(v.F.x1, v.E.x1);
  EXPECT_EQ(v.F.x2, separatrix_lower_x2(ref, v.E.x1));
  EXPECT_LT(v.E.x2, 0.0);
  EXPECT_GE(v.E.x2, v.F.x2);
}

TEST(BuildRegion, ReferenceTakesEightPieceBranch) {
  const auto& r = reference_region();
  EXPECT_TRUE(r.case_eight_pieces);
  EXPECT_LT(r.vertices.B.x1, ref.nu());
  ASSERT_TRUE(r.vertices.B1.has_value());
  EXPECT_EQ(r.vertices.B1->x1, ref.nu());
  EXPECT_EQ(r.vertices.B1->x2, r.vertices.B.x2);
  std::vector<std::string> names;
  for (const auto& piece : r.pieces) names.push_back(piece.name);
  EXPECT_EQ(names, (std::vector<std::string>{"P2A", "AB", "BB1", "B1C", "CD", "DE", "EF", "FP2"}));
}

TEST(BuildRegion, ReferenceReportsConditionOneFailure) {
  // E sits right of -nu for these parameters; E2 holds.
  const auto& c = reference_region().conditions;
  EXPECT_TRUE(c.e1_lower);
  EXPECT_FALSE(c.e1_upper);
  EXPECT_TRUE(c.e2);
  EXPECT_FALSE(c.all_hold());
  try {
    BuildOptions strict;
    strict.strict_conditions = true;
    build_region(ref, strict);
    FAIL();
  } catch (const ConditionError& err) {
    EXPECT_EQ(err.code(), ErrorCode::ConditionE1Violated);
    EXPECT_NEAR(err.e_point().x1, reference_region().vertices.E.x1, 1e-15);
    EXPECT_EQ(err.bound(), -ref.nu());
  }
}

TEST(BuildRegion, ChainClosesAndPiecesMatchExpectations) {
  const auto& r = reference_region();
  for (std::size_t i = 0; i < r.pieces.size(); ++i) {
    const auto& piece = r.pieces[i];
    ASSERT_GE(piece.polyline.size(), 2u);
    EXPECT_EQ(piece.polyline.front(), piece.start);
    EXPECT_EQ(piece.polyline.back(), piece.end);
    for (std::size_t k = 1; k < piece.polyline.size(); ++k) EXPECT_NE(piece.polyline[k - 1], piece.polyline[k]);
    const auto& next = r.pieces[(i + 1) % r.pieces.size()];
    EXPECT_LE(distance(piece.end, next.start), 1e-8) << piece.name;
  }
  EXPECT_LE(distance(r.pieces.back().end, State{-3.5, 0}), 1e-8);
  const std::map<std::string, Crossing> expected{
      {"P2A", Crossing::LeftToRight}, {"AB", Crossing::LeftToRight},   {"BB1", Crossing::TopToBottom},
      {"B1C", Crossing::LeftToRight}, {"CD", Crossing::RightToLeft},   {"DE", Crossing::RightToLeft},
      {"EF", Crossing::RightToLeft},  {"FP2", Crossing::RightToLeft}};
  for (const auto& piece : r.pieces) EXPECT_EQ(piece.expected_crossing, expected.at(piece.name)) << piece.name;
}

TEST(BuildRegion, CircleArcHasConstantRadius) {
  const auto& r = reference_region();
  const double radius = norm(*r.vertices.B1);
  for (const auto& piece : r.pieces)
    if (piece.kind == PieceKind::CircleArc)
      for (State s : piece.polyline) EXPECT_NEAR(norm(s), radius, 1e-9);
}

TEST(BuildRegion, SeparatrixArcIsLevelSet) {
  const auto& r = reference_region();
  const double level = energy(ref, {-3.5, 0});
  for (const auto& piece : r.pieces)
    if (piece.kind == PieceKind::SeparatrixArc)
      for (State s : piece.polyline) EXPECT_NEAR(energy(ref, s), level, 1e-10 * std::max(1.0, level));
}

TEST(BuildRegion, AsymptoteResidualAtD) {
  const State D = reference_region().vertices.D;
  const double scale = std::max({1.0, std::abs(D.x1), ref.alpha() * ref.e() * ref.d() * std::abs(D.x2)});
  EXPECT_LE(std::abs(D.x1 + ref.alpha() * ref.e() * ref.d() * D.x2 + ref.e() + ref.d()), 1e-12 * scale);
}

TEST(BuildRegion, PolygonIsSimpleAndEnclosesOrigin) {
  const auto& r = reference_region();
  EXPECT_FALSE(find_self_intersection(r.polygon));
  EXPECT_EQ(contains(r, {0, 0}), Location::Inside);
  EXPECT_EQ(contains(r, {-4, 0}), Location::Outside);
  EXPECT_EQ(contains(r, {100, 100}), Location::Outside);
  const State mid_cd = 0.5 * (r.vertices.C + r.vertices.D);
  EXPECT_EQ(contains(r, mid_cd), Location::OnBoundary);
}

TEST(BuildRegion, SevenPieceCase) {
  const InvariantRegion r = build_region(Parameters::make(4.0, 0.3, 3.5, 7.0));
  EXPECT_FALSE(r.case_eight_pieces);
  EXPECT_FALSE(r.vertices.B1.has_value());
  EXPECT_GE(r.vertices.B.x1, 0.3);
  EXPECT_EQ(r.pieces[2].name, "BC");
  EXPECT_EQ(r.pieces.size(), 7u);
  EXPECT_TRUE(r.conditions.all_hold());
  for (State s : r.pieces[2].polyline) EXPECT_NEAR(norm(s), norm(r.vertices.B), 1e-9);
}

TEST(BuildRegion, EightPieceCaseWithBothConditions) {
  const InvariantRegion r = build_region(Parameters::make(3.0, 0.3, 3.5, 4.0));
  EXPECT_TRUE(r.case_eight_pieces);
  EXPECT_TRUE(r.conditions.all_hold());
  EXPECT_LE(r.vertices.E.x1, -0.3);
}

TEST(BuildRegion, FailureKinds) {
  EXPECT_EQ(build_error(Parameters::make(1.5, 0.5, 3.5, 4.0)), ErrorCode::ConditionE2Violated);
  EXPECT_EQ(build_error(Parameters::make(5.0, 0.3, 3.5, 4.0)), ErrorCode::ConditionE2Violated);
  BuildOptions short_time;
  short_time.t_max_piece = 0.01;
  EXPECT_EQ(build_error(ref, short_time), ErrorCode::EventNotReached);
}

TEST(BuildRegion, ConditionErrorCarriesEAndBound) {
  try {
    build_region(Parameters::make(1.5, 0.5, 3.5, 4.0));
    FAIL();
  } catch (const ConditionError& err) {
    EXPECT_EQ(err.code(), ErrorCode::ConditionE2Violated);
    EXPECT_TRUE(is_finite(err.e_point()));
    EXPECT_NE(std::string(err.what()).find("E = ("), std::string::npos);
  }
}

TEST(Assembly, SyntheticEightPieceChain) {
  // Hand-made pieces closing a ring: the assembler must drop shared endpoints
  // and the closing duplicate of the first vertex.
  auto seg = [](std::string name, State a, State b) {
    return CurvePiece{std::move(name), PieceKind::VerticalSegment, a, b, {a, 0.5 * (a + b), b}, Crossing::RightToLeft};
  };
  const std::vector<State> corners{{-3, 0}, {-1, 1}, {0, 1.5}, {0.2, 1.5}, {1, 0}, {1, -0.5}, {-0.2, -1}, {-0.2, -1.2}};
  std::vector<CurvePiece> pieces;
  for (std::size_t i = 0; i < corners.size(); ++i)
    pieces.push_back(seg("p" + std::to_string(i), corners[i], corners[(i + 1) % corners.size()]));
  const Polyline ring = assemble_ring(pieces);
  EXPECT_EQ(ring.size(), 2 * corners.size());
  EXPECT_EQ(ring.front(), corners.front());
  EXPECT_FALSE(find_self_intersection(ring));
}

TEST(PolygonOf, RefinesAndKeepsVertices) {
  const auto& r = reference_region();
  const Polyline fine = polygon_of(r, 0.01);
  for (std::size_t i = 0; i < fine.size(); ++i)
    EXPECT_LE(distance(fine[i], fine[(i + 1) % fine.size()]), 0.01 * (1 + 1e-12));
  auto has = [](const Polyline& ring, State v) {
    for (State s : ring)
      if (distance(s, v) <= 1e-12) return true;
    return false;
  };
  for (const auto& [name, v] : r.vertices.named()) {
    EXPECT_TRUE(has(fine, v)) << name;
  }
  const Polyline coarse = polygon_of(r, 1e6);
  EXPECT_EQ(coarse.size(), r.pieces.size());
  for (const auto& [name, v] : r.vertices.named()) EXPECT_TRUE(has(coarse, v)) << name;
}

TEST(ScaledCopy, ShrinksEverything) {
  const auto& r = reference_region();
  const InvariantRegion small = scaled_copy(r, 0.8);
  EXPECT_NEAR(signed_area(small.polygon), 0.64 * signed_area(r.polygon), 1e-9);
  EXPECT_EQ(small.vertices.C, 0.8 * r.vertices.C);
  EXPECT_EQ(contains(small, {0, 0}), Location::Inside);
}
