// Builds the region for one parameter set, verifies it, and locates the
// periodic orbit inside it.
//
//   region_demo [alpha nu e d]

#include <cstdio>
#include <cstdlib>

#include "regionkit/region.hpp"
#include "regionkit/verifier.hpp"

int main(int argc, char** argv) {
  using namespace regionkit;
  double a = 3.0, n = 0.3, e = 3.5, d = 4.0;
  if (argc == 5) a = std::atof(argv[1]), n = std::atof(argv[2]), e = std::atof(argv[3]), d = std::atof(argv[4]);
  try {
    const Parameters p = Parameters::make(a, n, e, d);
    const InvariantRegion region = build_region(p);
    std::printf("%zu pieces, %zu polygon vertices, conditions %s\n", region.pieces.size(),
                region.polygon.size(), region.conditions.all_hold() ? "hold" : "FAIL");
    for (const auto& [name, s] : region.vertices.named()) std::printf("  %-3s (% .10f, % .10f)\n", name.c_str(), s.x1, s.x2);

    const InvarianceReport flow = check_inward_flow(region, p, 2000);
    std::printf("inward flow: %zu violations, max f.n_out = %.3g\n", flow.violations.size(),
                flow.max_outward_component);

    const PeriodicOrbit cycle = find_limit_cycle(p, {0.1, 0.0});
    std::printf("limit cycle: period %.12f, crosses x2 = 0 at x1 = %.12f\n", cycle.period,
                cycle.section_point.x1);
    return flow.ok() ? 0 : 1;
  } catch (const Error& err) {
    std::fprintf(stderr, "%s\n", err.what());
    return 2;
  }
}
