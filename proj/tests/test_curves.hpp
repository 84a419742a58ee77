#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <memory>

#include "acpm/curve.hpp"
#include "acpm/expr.hpp"
#include "acpm/numeric.hpp"

namespace acpm::testing {

/// Curve given by its velocity: υ(s) = p0 + ∫ₛ₀ˢ v, with υ″ and υ‴ from symbolic derivatives.
inline Curve velocity_curve(const std::string& label, const Vec3& p0, double s0,
                            const std::array<std::string, 3>& velocity, double lo, double hi) {
  struct Data {
    expr::Expr v[3][3];
    numeric::CumulativeIntegral pos[3];
    Vec3 p0;
    double s0;
  };
  auto d = std::make_shared<Data>();
  d->p0 = p0;
  d->s0 = s0;
  for (int i = 0; i < 3; ++i) {
    d->v[i][0] = expr::parse(velocity[i]);
    for (int k = 1; k < 3; ++k) d->v[i][k] = expr::differentiate(d->v[i][k - 1], expr::Var::s);
    const expr::Expr f = d->v[i][0];
    d->pos[i] = numeric::CumulativeIntegral([f](double s) { return f.eval(expr::Bindings::at_parameter(s)); },
                                            std::min(lo, s0), std::max(hi, s0), 8192);
  }
  return Curve(label, lo, hi, [d](double s) {
    const auto b = expr::Bindings::at_parameter(s);
    CurveJet j;
    for (int i = 0; i < 3; ++i) {
      j.position[i] = d->p0[i] + d->pos[i].between(d->s0, s);
      j.d1[i] = d->v[i][0].eval(b);
      j.d2[i] = d->v[i][1].eval(b);
      j.d3[i] = d->v[i][2].eval(b);
    }
    return j;
  });
}

/// Unit-speed, non-Legendre curve of N³ with ε = +1:
///   (0, y(s), c(1 − cos s)),  y′ = √(1 − c² sin² s)·exp(−c(1 − cos s)).
/// With x′ = 0 the speed is exp(2z)y′² + z′², which the choice of y′ makes 1, and
/// m = z′ = c sin s.
inline Curve generic_n3_curve(double lo = -3.0, double hi = 3.0, double c = 0.5) {
  const std::string cs = std::to_string(c);
  return velocity_curve("generic_n3", Vec3::Zero(), 0.0,
                        {"0", "sqrt(1 - " + cs + "^2*sin(s)^2)*exp(-" + cs + "*(1 - cos(s)))", cs + "*sin(s)"}, lo,
                        hi);
}

/// Unit-speed, non-Legendre curve of Q³ with ε = +1 on the plane x = 1:
///   υ′ = (0, w, 2w + √(1 − w²)),  w = 0.5 + 0.2 sin s,
/// so m = √(1 − w²) and δ = |w| ≥ 0.3.
inline Curve generic_q3_curve(double lo = -3.0, double hi = 3.0) {
  return velocity_curve("generic_q3", Vec3(1, 0, 0), 0.0,
                        {"0", "0.5 + 0.2*sin(s)", "2*(0.5 + 0.2*sin(s)) + sqrt(1 - (0.5 + 0.2*sin(s))^2)"}, lo, hi);
}

/// Null curve of Q³ with ε = −1 through (1, 0, 0) with velocity ∂₁ + ∂₃ at s = 0.
/// Its velocity (1, 0, x) has g = x² − x² = 0 and η(υ′) = x ≠ 0.
inline Curve null_q3_curve() {
  return expression_curve("null_q3", {"1 + s", "0", "((1 + s)^2 - 1)/2"}, -0.5, 0.5);
}

}  // namespace acpm::testing
