#pragma once

#include <memory>
#include <string>
#include <vector>

#include "acpm/curve.hpp"
#include "acpm/expr.hpp"
#include "acpm/frenet.hpp"
#include "acpm/numeric.hpp"

namespace acpm {

/// Classical space-curve sphericity residual τ/κ + ((1/τ)(1/κ)′)′ with finite-difference
/// derivatives. Throws DomainError when κ or τ vanishes on the stencil.
double euclidean_spherical_residual(const ScalarFn& kappa, const ScalarFn& tau, double s,
                                    double h = numeric::kCurveStep);
/// Same residual with κ(s), τ(s) given as expressions in s and exact derivatives.
double euclidean_spherical_residual(const expr::Expr& kappa, const expr::Expr& tau, double s);

/// Osculating sphere of a Legendre curve in a quasi-Sasakian structure, in the frame
/// N = φυ′, B = ε·sgn(α)·ξ, with θ = g(∇_υ′υ′, φυ′) signed:
///   c = υ + (1/θ)N − (θ′/(θ²|α|))B.
struct OsculatingData {
  double s = 0.0;
  double theta = 0.0;
  double theta_prime = 0.0;
  double alpha = 0.0;
  double center_offset_N = 0.0;  // 1/θ
  double center_offset_B = 0.0;  // −θ′/(θ²|α|)
  double radius2_signed = 0.0;   // (1/θ)² + ε(θ′/(θ²|α|))²
  Vec3 N = Vec3::Zero();
  Vec3 B = Vec3::Zero();
  /// Chart coordinates of υ plus the frame displacement added componentwise. This is a
  /// convenience for plotting only; it is not a point of the manifold in any intrinsic sense.
  Point center_chart;
};

/// Throws NotLegendreError, HypothesisError (β ≠ 0 at υ(s)), GeodesicError (θ = 0) or
/// DomainError (α = 0).
OsculatingData osculating_sphere(const StructureTensors& m, const Curve& curve, double s,
                                 const FrenetOptions& opt = {});

/// (θ′/(θ²|α|))′ − ε|α|/θ, evaluated as the negative of the rewritten form below (which works
/// with 1/θ and stays well conditioned where θ is large). Throws DomainError when θ or α
/// vanishes on the stencil.
double spherical_residual_q3(const ScalarFn& theta, const ScalarFn& alpha, int epsilon, double s,
                             double h = numeric::kCurveStep);
/// Same residual with θ′ supplied, so only the outer derivative is taken numerically.
double spherical_residual_q3(const ScalarFn& theta, const ScalarFn& theta_prime, const ScalarFn& alpha, int epsilon,
                             double s, double h = numeric::kCurveStep);
/// The rewritten form ((1/θ)′/|α|)′ + ε|α|/θ.
double spherical_residual_q3_rewritten(const ScalarFn& theta, const ScalarFn& alpha, int epsilon, double s,
                                       double h = numeric::kCurveStep);

enum class ThetaKind { spacelike_trig, timelike_hyp };

ThetaKind theta_kind_from_string(const std::string& name);
std::string to_string(ThetaKind kind);

/// Closed-form solutions of the sphericity equation with A(s) = ∫ₛ₀ˢ|α|:
///   spacelike_trig (ε = +1): 1/θ = c₁cos A + c₂sin A
///   timelike_hyp   (ε = −1): 1/θ = c₁cosh A + c₂sinh A, with c₁ ≠ ±c₂.
class ThetaSolution {
 public:
  ThetaKind kind() const { return kind_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double s0() const { return s0_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  int epsilon() const { return kind_ == ThetaKind::spacelike_trig ? 1 : -1; }

  double alpha(double s) const { return alpha_(s); }
  /// ∫ₛ₀ˢ|α|.
  double integral(double s) const;
  double inverse_theta(double s) const;
  double theta(double s) const { return 1.0 / inverse_theta(s); }
  /// Exact θ′ from (1/θ)′ = |α|·(dA-derivative of the trig/hyperbolic combination).
  double theta_prime(double s) const;

  ScalarFn theta_fn() const;
  ScalarFn alpha_fn() const { return alpha_; }

 private:
  friend ThetaSolution theta_solution(ThetaKind, double, double, const ScalarFn&, double, double, double);
  ThetaKind kind_ = ThetaKind::spacelike_trig;
  double c1_ = 0.0, c2_ = 0.0, s0_ = 0.0, lo_ = 0.0, hi_ = 0.0;
  ScalarFn alpha_;
  std::shared_ptr<numeric::CumulativeIntegral> table_;
};

/// Builds the solution on [lo, hi] (s0 inside or outside). The |α| antiderivative is tabulated
/// with composite Simpson, refined 4× until the total agrees with a converged Simpson value to
/// 1e−12. Throws ValidationError for c₁ = ±c₂ (timelike) or c₁ = c₂ = 0, and DomainError when α
/// or 1/θ vanishes on the interval (the solution then only exists on a restricted domain).
ThetaSolution theta_solution(ThetaKind kind, double c1, double c2, const ScalarFn& alpha, double s0, double lo,
                             double hi);

enum class SphericalVerdict { spherical, not_spherical, excluded_case };

std::string to_string(SphericalVerdict v);

struct SphericalReport {
  SphericalVerdict verdict = SphericalVerdict::not_spherical;
  int epsilon = 1;
  std::vector<double> s;
  std::vector<double> residual;       // sphericity residual at each grid point
  std::vector<double> radius2;        // signed squared radius at each grid point
  double max_abs_residual = 0.0;
  double min_abs_residual = 0.0;
  double radius2_variation = 0.0;     // max − min of the signed squared radius
  /// Centre motion cross-check, only filled when a curve is classified: the largest
  /// ‖∇c‖ and the largest ‖∇c + residual·B‖ (which should vanish identically).
  bool has_center_check = false;
  double max_center_speed = 0.0;
  double center_consistency = 0.0;
  bool theta_constant = false;     // hypothesis: θ must not be constant
  bool theta_exponential = false;  // hypothesis (ε = −1): θ ≠ θ(s₀)exp(±∫|α|)
  std::vector<std::string> notes;
};

/// Verdict from θ(s) and α(s) alone: not_spherical when the residual exceeds tol somewhere;
/// otherwise excluded_case if a hypothesis of the characterization fails, else spherical.
SphericalReport classify_spherical(const ScalarFn& theta, const ScalarFn& alpha, int epsilon,
                                   const std::vector<double>& grid, double tol);

/// Verdict for a closed-form solution, using its exact θ′ (stencils stay inside its interval).
SphericalReport classify_spherical(const ThetaSolution& sol, const std::vector<double>& grid, double tol);

/// Same verdict for a Legendre curve of a quasi-Sasakian structure, with θ and α read off the
/// curve and the osculating centre's motion cross-checked along the grid.
SphericalReport classify_spherical(const StructureTensors& m, const Curve& curve, const std::vector<double>& grid,
                                   double tol, const FrenetOptions& opt = {});

}  // namespace acpm
