#pragma once

// Van der Pol type oscillator with a cubic restoring force
//
//   x1' = x2
//   x2' = -alpha (x1^2 - nu^2) x2 - x1 (x1 + d)(x1 + e) / (e d)
//
// plus the three simpler fields whose orbits make up the trapping-region
// boundary: a linear spiral (aux1), a rotation (aux2) and the undamped
// conservative system.

#include <array>
#include <cmath>
#include <sstream>
#include <string_view>

#include "regionkit/errors.hpp"
#include "regionkit/state.hpp"

namespace regionkit {

/// Control parameters (alpha, nu, e, d). Only constructible through make(),
/// which enforces alpha > 0 and 0 < nu < e < d <= 2e.
class Parameters {
 public:
  static Parameters make(double alpha, double nu, double e, double d) {
    auto fail = [&](std::string_view violated) {
      std::ostringstream os;
      os.precision(17);
      os << "violated " << violated << " (alpha=" << alpha << ", nu=" << nu << ", e=" << e
         << ", d=" << d << ")";
      throw Error(ErrorCode::InvalidParameters, os.str());
    };
    if (!(std::isfinite(alpha) && std::isfinite(nu) && std::isfinite(e) && std::isfinite(d)))
      fail("finite parameters");
    if (!(alpha > 0.0)) fail("alpha > 0");
    if (!(nu > 0.0)) fail("0 < nu");
    if (!(nu < e)) fail("nu < e");
    if (!(e < d)) fail("e < d");
    if (!(d <= 2.0 * e)) fail("d <= 2e");
    return Parameters(alpha, nu, e, d);
  }

  /// Default configuration: alpha 1.5, nu 0.1, e 3.5, d 4.0.
  static Parameters reference() { return make(1.5, 0.1, 3.5, 4.0); }

  double alpha() const noexcept { return alpha_; }
  double nu() const noexcept { return nu_; }
  double e() const noexcept { return e_; }
  double d() const noexcept { return d_; }

  friend bool operator==(const Parameters&, const Parameters&) = default;

 private:
  Parameters(double alpha, double nu, double e, double d) : alpha_(alpha), nu_(nu), e_(e), d_(d) {}

  double alpha_;
  double nu_;
  double e_;
  double d_;
};

/// x1 (x1 + d)(x1 + e) / (e d): the cubic restoring force.
inline double restoring_force(const Parameters& p, double x1) {
  return x1 * (x1 + p.d()) * (x1 + p.e()) / (p.e() * p.d());
}

inline State vector_field_main(const Parameters& p, State s) {
  return {s.x2,
          -p.alpha() * (s.x1 * s.x1 - p.nu() * p.nu()) * s.x2 - restoring_force(p, s.x1)};
}

inline State vector_field_aux1(const Parameters& p, State s) {
  return {s.x2, -s.x1 + p.alpha() * p.nu() * p.nu() * s.x2};
}

inline State vector_field_aux2(State s) { return {s.x2, -s.x1}; }

inline State vector_field_conservative(const Parameters& p, State s) {
  return {s.x2, -restoring_force(p, s.x1)};
}

/// Conserved quantity of the conservative field.
inline double energy(const Parameters& p, State s) {
  const double x1 = s.x1;
  const double ed = p.e() * p.d();
  return 0.5 * s.x2 * s.x2 +
         x1 * x1 * (0.5 + (1.0 / p.e() + 1.0 / p.d()) * x1 / 3.0 + x1 * x1 / (4.0 * ed));
}

/// Callable wrappers, for handing a field to the integrator.
struct MainField {
  Parameters params;
  static constexpr std::string_view id = "main";
  State operator()(State s) const { return vector_field_main(params, s); }
};

struct Aux1Field {
  Parameters params;
  static constexpr std::string_view id = "aux1";
  State operator()(State s) const { return vector_field_aux1(params, s); }
};

struct Aux2Field {
  static constexpr std::string_view id = "aux2";
  State operator()(State s) const { return vector_field_aux2(s); }
};

struct ConservativeField {
  Parameters params;
  static constexpr std::string_view id = "conservative";
  State operator()(State s) const { return vector_field_conservative(params, s); }
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

inline Matrix2 jacobian_main(const Parameters& p, State s) {
  const double ed = p.e() * p.d();
  const double x1 = s.x1;
  return {{{0.0, 1.0},
           {-2.0 * p.alpha() * x1 * s.x2 - (3.0 * x1 * x1 + 2.0 * (p.e() + p.d()) * x1 + ed) / ed,
            -p.alpha() * (x1 * x1 - p.nu() * p.nu())}}};
}

enum class EquilibriumKind { UnstableFocus, UnstableNode, Saddle, StableFocus, StableNode };

inline std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::UnstableFocus: return "UnstableFocus";
    case EquilibriumKind::UnstableNode: return "UnstableNode";
    case EquilibriumKind::Saddle: return "Saddle";
    case EquilibriumKind::StableFocus: return "StableFocus";
    case EquilibriumKind::StableNode: return "StableNode";
  }
  return "Unknown";
}

/// Linearization type from trace and determinant. A zero discriminant is a
/// node; det == 0 or trace == 0 with det > 0 are not hyperbolic and are
/// rejected.
inline EquilibriumKind classify_linearization(double trace, double det) {
  if (det < 0.0) return EquilibriumKind::Saddle;
  if (!(det > 0.0) || trace == 0.0)
    throw Error(ErrorCode::InvalidArgument, "non-hyperbolic linearization");
  const bool focus = trace * trace < 4.0 * det;
  if (trace > 0.0) return focus ? EquilibriumKind::UnstableFocus : EquilibriumKind::UnstableNode;
  return focus ? EquilibriumKind::StableFocus : EquilibriumKind::StableNode;
}

struct Equilibrium {
  State location;
  EquilibriumKind kind;
  double trace;
  double determinant;
};

/// Classifies P1 = (0,0), P2 = (-e,0), P3 = (-d,0), in that order.
///
/// Trace and determinant come from the closed forms of the Jacobian at each
/// point (its lower-left entry reduces to -1, (d-e)/d and -(d-e)/e):
/// no finite differencing or eigen-solver is involved.
inline std::array<Equilibrium, 3> equilibria(const Parameters& p) {
  const double a = p.alpha(), nu2 = p.nu() * p.nu(), e = p.e(), d = p.d();
  auto make = [](State at, double trace, double det) {
    return Equilibrium{at, classify_linearization(trace, det), trace, det};
  };
  return {make({0.0, 0.0}, a * nu2, 1.0),
          make({-e, 0.0}, -a * (e * e - nu2), -(d - e) / d),
          make({-d, 0.0}, -a * (d * d - nu2), (d - e) / e)};
}

}  // namespace regionkit
