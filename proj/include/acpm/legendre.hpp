#pragma once

#include <memory>
#include <string>

#include "acpm/curve.hpp"
#include "acpm/expr.hpp"

namespace acpm {

/// Angle function ψ(s) of the Q³ generator, anchored at s0 where μ²(s0) = 0.
struct AngleFunction {
  expr::Expr psi;
  double s0 = 0.0;

  static AngleFunction parse(const std::string& text, double s0 = 0.0);
};

/// "upsilon1": (1, s, 0) on ℝ; "upsilon2": (−ln s, 1/2, ln s) on s > 0. Both are unit-speed
/// Legendre curves of N³ with exact derivatives.
Curve builtin_legendre(const std::string& name);

struct GeneratorTables;

/// A Legendre curve of Q³ built from ψ:
///   υ₁ = μ,  υ₂ = ∫ μ⁻¹ sin ψ,  υ₃ = 2∫ sin ψ,  μ² = 2∫ₛ₀ˢ cos ψ.
/// υ₁ = μ is forced by the Legendre and unit-speed conditions, so generation is pure
/// quadrature. υ₂ and υ₃ are anchored at the lower end of the interval (μ⁻¹ is singular at
/// s0); a different anchor only translates the curve in (y, z), which is an isometry.
struct GeneratedLegendre {
  Curve curve;
  AngleFunction psi;
  double lo = 0.0;
  double hi = 0.0;
  std::shared_ptr<const GeneratorTables> tables;

  double mu2(double s) const;
};

/// Throws DomainError naming the offending s when μ² ≤ 0 somewhere on [lo, hi].
GeneratedLegendre generate_legendre_q3(const AngleFunction& psi, double lo, double hi, int cells = 4096);

struct KappaTauK2 {
  double kappa_signed = 0.0;  // ψ′ + sin ψ/μ²
  double kappa = 0.0;         // |ψ′ + sin ψ/μ²|
  double tau = 0.0;           // 1/μ²
  double mu2 = 0.0;
  /// |τ − α(υ(s))|, computed from the connection of Q³; NaN when no curve is available.
  double alpha_residual = 0.0;
};

/// Closed-form κ, τ of the generated curve. μ² comes from converged Simpson quadrature.
/// Throws DomainError for μ² ≤ 0 and GeodesicError when |κ| is below 1e−7.
KappaTauK2 kappa_tau_k2(const AngleFunction& psi, double s);
/// Same, with μ² from the generator's table and the α identity checked at υ(s).
KappaTauK2 kappa_tau_k2(const GeneratedLegendre& gen, double s);

}  // namespace acpm
