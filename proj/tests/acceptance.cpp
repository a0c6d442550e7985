// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "regionkit/region.hpp"
#include "regionkit/verifier.hpp"

using namespace regionkit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Parameters ref = Parameters::reference();

const InvariantRegion& reference_region() {
  static const InvariantRegion region = build_region(ref);
  return region;
}

Parameters random_valid(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double e = 0.5 + 5.0 * u(rng);
  const double nu = (0.01 + 0.98 * u(rng)) * e;
  const double d = e * (1.0 + 1e-3 + (1.0 - 2e-3) * u(rng));
  return Parameters::make(0.05 + 5.0 * u(rng), nu, e, d);
}

// 1. Build at (1.5, 0.1, 3.5, 4.0): closes within 1e-8, simple, origin interior, <= 10 s.
Outcome criterion_1() {
  const auto t0 = Clock::now();
  const InvariantRegion r = build_region(ref);
  const double elapsed = seconds_since(t0);
  double gap = 0.0;
  for (std::size_t i = 0; i < r.pieces.size(); ++i)
    gap = std::max(gap, distance(r.pieces[i].end, r.pieces[(i + 1) % r.pieces.size()].start));
  gap = std::max(gap, distance(r.pieces.back().end, State{-ref.e(), 0.0}));
  const bool simple = !find_self_intersection(r.polygon);
  const bool origin_inside = contains(r, {0.0, 0.0}) == Location::Inside;
  return {gap <= 1e-8 && simple && origin_inside && elapsed <= 10.0,
          fmt("closure gap %.3g, simple %d, origin inside %d, %.3f s", gap, simple, origin_inside, elapsed)};
}

// 2. Zero non-exempt violations at 1e4 and 1e5 boundary samples, <= 30 s.
Outcome criterion_2() {
  const auto& r = reference_region();
  const auto t0 = Clock::now();
  const std::size_t pieces = r.pieces.size();
  const InvarianceReport lo = check_inward_flow(r, ref, 10000 / pieces);
  const InvarianceReport hi = check_inward_flow(r, ref, 100000 / pieces);
  const double elapsed = seconds_since(t0);
  std::string where;
  if (!hi.violations.empty()) {
    double x_min = 1e300, x_max = -1e300;
    for (const auto& v : hi.violations) x_min = std::min(x_min, v.at.x1), x_max = std::max(x_max, v.at.x1);
    where = fmt(" (all on %s, x1 in [%.5f, %.5f])", hi.violations.front().piece.c_str(), x_min, x_max);
  }
  return {lo.ok() && hi.ok() && elapsed <= 30.0,
          fmt("violations %zu at %zu samples, %zu at %zu samples, max f.n_out %.3g%s, %.3f s",
              lo.violations.size(), lo.samples_checked, hi.violations.size(), hi.samples_checked,
              hi.max_outward_component, where.c_str(), elapsed)};
}

// 3. Six boundary orbits, 1e-6 inside, horizon 200: never leave, and the last
//    section crossing is within 1e-4 of the cycle's section point.
Outcome criterion_3() {
  const auto& r = reference_region();
  const PeriodicOrbit cycle = find_limit_cycle(ref, {0.1, 0.0});
  const auto starts = boundary_start_points(r, 6);
  const ContainmentReport report = check_containment_by_simulation(r, ref, starts, 200.0, {}, 1e-6);
  double worst = 0.0;
  for (const State s0 : report.starts) {
    const auto hits = section_crossings(ref, s0, 200.0);
    worst = hits.empty() ? INFINITY : std::max(worst, distance(hits.back().state, cycle.section_point));
  }
  return {report.ok() && worst <= 1e-4,
          fmt("escapes %zu, failures %zu, max distance of final crossing to cycle %.3g", report.escapes.size(),
              report.failures.size(), worst)};
}

// 4. Two seeds converge (difference <= 1e-9), agree within 1e-6, closure
//    <= 1e-7, polyline inside the region.
Outcome criterion_4() {
  const PeriodicOrbit a = find_limit_cycle(ref, {0.1, 0.0});
  const PeriodicOrbit b = find_limit_cycle(ref, {2.0, 0.0});
  const PolygonIndex index(reference_region().polygon);
  bool inside = true;
  for (State s : a.polyline) inside &= index.locate(s) == Location::Inside;
  for (State s : b.polyline) inside &= index.locate(s) == Location::Inside;
  const double agree = std::abs(a.section_point.x1 - b.section_point.x1);
  const double closure = std::max(a.closure_error, b.closure_error);
  const bool pass = a.last_return_difference <= 1e-9 && b.last_return_difference <= 1e-9 && agree <= 1e-6 &&
                    closure <= 1e-7 && inside;
  return {pass, fmt("return diffs %.2g / %.2g, section x1 %.12f vs %.12f (diff %.2g), closure %.2g, inside %d",
                    a.last_return_difference, b.last_return_difference, a.section_point.x1, b.section_point.x1,
                    agree, closure, inside)};
}

// 5. 100 random tuples: saddle / unstable / stable signs; Jacobian vs central
//    differences to 1e-6 relative.
Outcome criterion_5() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int sign_failures = 0;
  double worst_rel = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Parameters p = random_valid(rng);
    const auto eq = equilibria(p);
    sign_failures += !(eq[1].determinant < 0.0);
    sign_failures += !(eq[0].determinant > 0.0 && eq[0].trace > 0.0);
    sign_failures += !(eq[2].determinant > 0.0 && eq[2].trace < 0.0);
    std::vector<State> points{eq[0].location, eq[1].location, eq[2].location, {u(rng), u(rng)}};
    for (State s : points) {
      const Matrix2 jac = jacobian_main(p, s);
      const double h = 1e-6;
      const State dx = (1.0 / (2 * h)) * (vector_field_main(p, {s.x1 + h, s.x2}) - vector_field_main(p, {s.x1 - h, s.x2}));
      const State dy = (1.0 / (2 * h)) * (vector_field_main(p, {s.x1, s.x2 + h}) - vector_field_main(p, {s.x1, s.x2 - h}));
      const double fd[2][2] = {{dx.x1, dy.x1}, {dx.x2, dy.x2}};
      for (int rr = 0; rr < 2; ++rr)
        for (int c = 0; c < 2; ++c)
          worst_rel = std::max(worst_rel, std::abs(jac[rr][c] - fd[rr][c]) / std::max(1.0, std::abs(jac[rr][c])));
    }
  }
  return {sign_failures == 0 && worst_rel <= 1e-6,
          fmt("sign failures %d, worst Jacobian relative error %.3g", sign_failures, worst_rel)};
}

// 6. Energy drift <= 1e-8 over horizon 50 from 20 random points inside the loop.
Outcome criterion_6() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ux(-ref.e(), 2.0), uy(-2.0, 2.0);
  double worst = 0.0;
  int found = 0;
  while (found < 20) {
    const State s0{ux(rng), uy(rng)};
    const double rhs = separatrix_rhs(ref, s0.x1);
    // Inside the loop around the origin: right of the saddle and below the level.
    if (!(s0.x1 > -ref.e() && rhs > 0.0 && s0.x2 * s0.x2 < rhs)) continue;
    ++found;
    const double e0 = energy(ref, s0);
    const Trajectory traj = integrate(ConservativeField{ref}, s0, {0.0, 50.0});
    for (const auto& sample : traj.samples()) worst = std::max(worst, std::abs(energy(ref, sample.state) - e0));
  }
  return {worst <= 1e-8, fmt("max |E(t) - E(0)| = %.3g over %d orbits", worst, found)};
}

// 7. Tangency root equals the rightmost grid bracket; residual <= 1e-10 scale;
//    sign + near -e and - near -nu.
Outcome criterion_7() {
  const double a = ref.alpha(), n = ref.nu(), e = ref.e(), d = ref.d();
  auto poly = [&](double x) {
    const double eta = (x + e) * (x + d), xi = x * x - n * n;
    return -2 * x * x * eta * eta + a * e * d * xi * (a * n * n * xi - 1) * eta + (3 * x * x + 2 * (e + d) * x) * xi * eta +
           a * a * e * e * d * d * xi * xi * xi;
  };
  const int pts = 100000;
  const double delta = 1e-9 * (e - n), lo = -e + delta, hi = -n - delta;
  double br_lo = NAN, br_hi = NAN, xp = lo, rp = poly(lo);
  for (int i = 1; i < pts; ++i) {
    const double x = (i == pts - 1) ? hi : lo + (hi - lo) * i / (pts - 1);
    const double r = poly(x);
    if ((rp < 0) != (r < 0) || r == 0) br_lo = xp, br_hi = x;
    xp = x, rp = r;
  }
  const double x10 = find_tangency_abscissa(ref);
  const double residual = std::abs(tangency_residual(ref, x10)) / tangency_scale(ref, x10);
  const bool in_bracket = x10 >= br_lo && x10 <= br_hi;
  const bool signs = tangency_residual(ref, -e + 1e-9) > 0 && tangency_residual(ref, -n - 1e-9) < 0;
  return {in_bracket && residual <= 1e-10 && signs,
          fmt("x10 = %.12f in oracle bracket [%.12f, %.12f]: %d, scaled residual %.3g, end signs ok %d", x10, br_lo,
              br_hi, in_bracket, residual, signs)};
}

// 8. FP2 on the saddle level within 1e-10 scale; separatrix_rhs(-e) = 0 within 1e-12.
Outcome criterion_8() {
  const double level = ref.e() * ref.e() / 6.0 * (1.0 - ref.e() / (2.0 * ref.d()));
  const double scale = std::max(1.0, std::abs(level));
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& piece : reference_region().pieces)
    if (piece.name == "FP2")
      for (State s : piece.polyline) worst = std::max(worst, std::abs(energy(ref, s) - level)), ++count;
  const double at_saddle = std::abs(separatrix_rhs(ref, -ref.e()));
  return {count > 0 && worst <= 1e-10 * scale && at_saddle <= 1e-12 && std::abs(energy(ref, {-ref.e(), 0}) - level) <= 1e-14,
          fmt("%zu FP2 points, max |E - E(P2)| %.3g, |rhs(-e)| %.3g", count, worst, at_saddle)};
}

// 9. 80% copy fails the inward check and lets a boundary orbit escape.
Outcome criterion_9() {
  const InvariantRegion small = scaled_copy(reference_region(), 0.8);
  const InvarianceReport flow = check_inward_flow(small, ref, 10000 / small.pieces.size());
  const auto starts = boundary_start_points(small, 6);
  const ContainmentReport sim = check_containment_by_simulation(small, ref, starts, 200.0);
  return {flow.violations.size() >= 1 && sim.escapes.size() >= 1,
          fmt("violations %zu, escapes %zu of 6", flow.violations.size(), sim.escapes.size())};
}

// 10. Grid alpha {1, 1.5, 2, 3, 4} x nu {0.05, 0.1, 0.2, 0.3} x e 3.5 x d {4, 5, 6, 7}:
//     at least one eight-piece build whose BB1 segment crosses top to bottom.
Outcome criterion_10() {
  int built = 0, eight = 0, eight_ok = 0, eight_all_conditions = 0;
  for (double a : {1.0, 1.5, 2.0, 3.0, 4.0})
    for (double n : {0.05, 0.1, 0.2, 0.3})
      for (double d : {4.0, 5.0, 6.0, 7.0}) {
        const Parameters p = Parameters::make(a, n, 3.5, d);
        std::optional<InvariantRegion> built_region;
        try {
          built_region = build_region(p);
        } catch (const Error&) {
          continue;
        }
        const InvariantRegion& r = *built_region;
        ++built;
        if (!r.case_eight_pieces) continue;
        ++eight;
        const State exempt[] = {r.vertices.P2, r.vertices.A};
        for (const auto& piece : r.pieces)
          if (piece.name == "BB1" && check_crossing_direction(piece, p, 2000, exempt).ok()) {
            ++eight_ok;
            eight_all_conditions += r.conditions.all_hold();
          }
      }
  return {eight_ok >= 1, fmt("80 tuples, %d built, %d eight-piece, %d with BB1 top-to-bottom (%d of them meeting both E conditions)",
                             built, eight, eight_ok, eight_all_conditions)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"reference build closes, simple, encloses origin", criterion_1},
      {"inward-flow certificate at 1e4 and 1e5 samples", criterion_2},
      {"six boundary orbits stay inside and reach the cycle", criterion_3},
      {"limit cycle from two seeds", criterion_4},
      {"equilibrium classification and Jacobian", criterion_5},
      {"energy conservation of the undamped system", criterion_6},
      {"tangency root equals grid oracle", criterion_7},
      {"separatrix arc is a level set", criterion_8},
      {"80% copy is not invariant", criterion_9},
      {"eight-piece case reached by grid scan", criterion_10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& ex) {
      out = {false, std::string("threw: ") + ex.what()};
    }
    failures += !out.pass;
    std::printf("%s %2zu  %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
