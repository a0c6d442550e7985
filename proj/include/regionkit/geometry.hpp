#pragma once

// Curves of the phase plane used by the boundary construction: the
// horizontal-flow nullcline, its oblique asymptote, the tangency equation that
// selects the corner A, and the separatrix loop of the conservative system.

#include <cmath>
#include <optional>
#include <vector>

#include "regionkit/errors.hpp"
#include "regionkit/system.hpp"

namespace regionkit {

/// Left-hand side of the horizontal-flow nullcline equation, i.e. x2' of the
/// main field.
inline double nullcline_residual(const Parameters& p, State s) {
  return vector_field_main(p, s).x2;
}

/// Gradient of nullcline_residual; normal to the nullcline where it vanishes.
inline State nullcline_gradient(const Parameters& p, State s) {
  const double ed = p.e() * p.d();
  return {-2.0 * p.alpha() * s.x1 * s.x2 -
              (3.0 * s.x1 * s.x1 + 2.0 * (p.e() + p.d()) * s.x1 + ed) / ed,
          -p.alpha() * (s.x1 * s.x1 - p.nu() * p.nu())};
}

/// The x2 on the nullcline above abscissa x1. Undefined on the vertical
/// asymptotes x1 = +-nu.
inline double nullcline_x2(const Parameters& p, double x1) {
  const double xi = x1 * x1 - p.nu() * p.nu();
  if (std::abs(std::abs(x1) - p.nu()) <= 1e-14)
    throw Error(ErrorCode::AsymptoteAbscissa, "x1 = +-nu is a vertical asymptote of the nullcline");
  const double x2 = -x1 * (x1 + p.d()) * (x1 + p.e()) / (p.alpha() * p.e() * p.d() * xi);
  return x2 == 0.0 ? 0.0 : x2;
}

/// x2 on the line x1 + alpha e d x2 + e + d = 0.
inline double oblique_asymptote_x2(const Parameters& p, double x1) {
  return -(x1 + p.e() + p.d()) / (p.alpha() * p.e() * p.d());
}

struct TangencyTerms {
  double eta;  // (x1 + e)(x1 + d)
  double xi;   // x1^2 - nu^2

  static TangencyTerms at(const Parameters& p, double x1) {
    return {(x1 + p.e()) * (x1 + p.d()), x1 * x1 - p.nu() * p.nu()};
  }
};

namespace detail {
inline double tangency_polynomial(const Parameters& p, double x1) {
  const auto [eta, xi] = TangencyTerms::at(p, x1);
  const double a = p.alpha(), ed = p.e() * p.d(), nu2 = p.nu() * p.nu();
  return -2.0 * x1 * x1 * eta * eta + a * ed * xi * (a * nu2 * xi - 1.0) * eta +
         (3.0 * x1 * x1 + 2.0 * (p.e() + p.d()) * x1) * xi * eta + a * a * ed * ed * xi * xi * xi;
}
}  // namespace detail

/// Tangency polynomial in x1 for the spiral field against the nullcline
/// branch x1 < -nu. Defined on the open interval (-e, -nu).
inline double tangency_residual(const Parameters& p, double x1) {
  if (!(x1 > -p.e() && x1 < -p.nu()))
    throw Error(ErrorCode::DomainError, "tangency residual is defined on (-e, -nu) only");
  return detail::tangency_polynomial(p, x1);
}

/// Magnitude used to judge a tangency root: max(1, |alpha^2 e^2 d^2 xi^3|).
inline double tangency_scale(const Parameters& p, double x1) {
  const double xi = TangencyTerms::at(p, x1).xi;
  const double ed = p.e() * p.d();
  return std::max(1.0, std::abs(p.alpha() * p.alpha() * ed * ed * xi * xi * xi));
}

struct Bracket {
  double lo;
  double hi;
};

/// Sign-change brackets of tangency_residual on a uniform grid of `points`
/// abscissas over (-e + delta, -nu - delta), delta = 1e-9 (e - nu).
inline std::vector<Bracket> tangency_brackets(const Parameters& p, int points = 100000) {
  const double delta = 1e-9 * (p.e() - p.nu());
  const double lo = -p.e() + delta, hi = -p.nu() - delta;
  std::vector<Bracket> out;
  double x_prev = lo;
  double r_prev = tangency_residual(p, lo);
  for (int i = 1; i < points; ++i) {
    const double x = (i == points - 1) ? hi : lo + (hi - lo) * i / (points - 1);
    const double r = tangency_residual(p, x);
    if ((r_prev < 0.0) != (r < 0.0) || r == 0.0) out.push_back({x_prev, x});
    x_prev = x;
    r_prev = r;
  }
  return out;
}

/// Bisects a sign-change bracket of f down to adjacent doubles.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double f_lo = f(lo);
  if (f_lo == 0.0) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

/// Abscissa x10 of the corner A: the root of the tangency polynomial in
/// (-e, -nu) nearest to -nu.
inline double find_tangency_abscissa(const Parameters& p) {
  const auto brackets = tangency_brackets(p);
  if (brackets.empty())
    throw Error(ErrorCode::TangencyRootNotFound, "no sign change of the tangency residual on (-e, -nu)");
  const Bracket rightmost = brackets.back();
  return bisect([&](double x) { return tangency_residual(p, x); }, rightmost.lo, rightmost.hi);
}

/// x2^2 on the level set of the conserved energy through the saddle (-e, 0).
inline double separatrix_rhs(const Parameters& p, double x1) {
  const double e = p.e(), d = p.d();
  return (e * e / 3.0) * (1.0 - e / (2.0 * d)) -
         x1 * x1 * (1.0 + (2.0 / 3.0) * (1.0 / e + 1.0 / d) * x1 + x1 * x1 / (2.0 * e * d));
}

/// Lower (x2 <= 0) branch of the separatrix loop.
inline double separatrix_lower_x2(const Parameters& p, double x1) {
  const double rhs = separatrix_rhs(p, x1);
  if (rhs < -1e-14)
    throw Error(ErrorCode::OutsideLoop, "abscissa lies outside the separatrix loop");
  const double r = std::sqrt(std::max(rhs, 0.0));
  return r == 0.0 ? 0.0 : -r;
}

/// Energy on the separatrix, E(-e, 0) = (e^2 / 6)(1 - e / (2d)).
inline double saddle_energy(const Parameters& p) {
  return p.e() * p.e() / 6.0 * (1.0 - p.e() / (2.0 * p.d()));
}

}  // namespace regionkit
