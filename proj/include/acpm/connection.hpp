#pragma once

#include <functional>
#include <vector>

#include "acpm/manifold.hpp"

namespace acpm {

enum class ConnectionSource { closed_form, finite_difference };

/// Point → Γᵏᵢⱼ of the Levi-Civita connection.
///
/// The closed-form field uses the manifold's Christoffel table when one is supplied, and
/// otherwise the Koszul formula over exact metric partials. The finite-difference field always
/// differentiates the metric numerically (central differences with one Richardson level), so it
/// stays independent of both closed-form routes.
class ConnectionField {
 public:
  static ConnectionField closed_form(const StructureTensors& m);
  static ConnectionField finite_difference(const StructureTensors& m, double step_scale = 1e-5);

  Christoffel at(const Point& p) const;
  ConnectionSource source() const { return source_; }
  double fd_step() const { return step_scale_; }

 private:
  ConnectionField(const StructureTensors& m, ConnectionSource source, double step_scale)
      : manifold_(m), source_(source), step_scale_(step_scale) {}

  StructureTensors manifold_;
  ConnectionSource source_;
  double step_scale_;
};

/// Γ at p via the preferred (closed-form) route.
Christoffel christoffel(const StructureTensors& m, const Point& p);

/// Γᵏᵢⱼ = ½ gᵏˡ(∂ᵢg_jl + ∂ⱼg_il − ∂ₗg_ij). Throws DegenerateError for a singular metric.
Christoffel christoffel_from_partials(const Mat3& metric, const std::array<Mat3, 3>& partials);

std::array<Mat3, 3> metric_partials_fd(const StructureTensors& m, const Point& p, double step_scale = 1e-5);

/// A vector field with an optional exact Jacobian J(k, l) = ∂ₗ Vᵏ.
struct VectorField {
  std::function<Vec3(const Point&)> value;
  std::function<Mat3(const Point&)> jacobian;

  Mat3 jacobian_at(const Point& p) const;
};

VectorField coordinate_field(int index);
VectorField constant_field(const Vec3& components);
VectorField reeb_field(const StructureTensors& m);
/// The field p ↦ φ(p) X(p).
VectorField phi_field(const StructureTensors& m, const VectorField& x);

/// ∂ₗφ at p, exact when available.
std::array<Mat3, 3> phi_partials(const StructureTensors& m, const Point& p);
Mat3 eta_jacobian(const StructureTensors& m, const Point& p);

/// (∇_X Y)ᵏ = X(Yᵏ) + Γᵏᵢⱼ Xⁱ Yʲ.
Vec3 covariant_derivative(const StructureTensors& m, const Point& p, const VectorField& x, const VectorField& y);
Vec3 covariant_derivative(const ConnectionField& conn, const Point& p, const VectorField& x, const VectorField& y);

/// Matrix whose column j is ∇_{∂ⱼ}ξ.
Mat3 nabla_xi(const StructureTensors& m, const ConnectionField& conn, const Point& p);

struct PseudoOrthonormalBasis {
  std::array<Vec3, 3> vectors;
  std::array<int, 3> signs{};  // g(eᵢ, eᵢ)
};

/// Gram–Schmidt from (∂₁, ∂₂, ∂₃), at each step taking the candidate farthest from null.
PseudoOrthonormalBasis pseudo_orthonormal_basis(const StructureTensors& m, const Point& p);

/// Σᵢ εᵢ g(A eᵢ, eᵢ) over the pseudo-orthonormal basis.
double metric_trace(const StructureTensors& m, const Point& p, const Mat3& endomorphism);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

/// α = (ε/2)·trace{X ↦ φ∇_Xξ}, β = (ε/2)·trace{X ↦ ∇_Xξ}. The ε/2 normalization is the one
/// for which ∇_Xξ = −εαφX + εβ(X − η(X)ξ) holds on normal structures.
AlphaBeta alpha_beta(const StructureTensors& m, const Point& p);
AlphaBeta alpha_beta(const StructureTensors& m, const ConnectionField& conn, const Point& p);

/// ‖∇_Xξ − (−εαφX + εβ(X − η(X)ξ))‖
double nabla_xi_residual(const StructureTensors& m, const Point& p, const Vec3& x);

/// ‖∇_{φX}ξ − φ∇_Xξ‖
double phi_commutation_residual(const StructureTensors& m, const Point& p, const Vec3& x);

/// ‖(∇_Xφ)Y − β(g(φX,Y)ξ − εη(Y)φX) − α(g(X,Y)ξ − εη(Y)X)‖
double nabla_phi_residual(const StructureTensors& m, const Point& p, const Vec3& x, const Vec3& y);
double nabla_phi_residual(const StructureTensors& m, const ConnectionField& conn, const Point& p, const Vec3& x,
                          const Vec3& y);

/// ‖(∇_Xφ)Y − (−η(Y)φ∇_Xξ + εg(φ∇_Xξ, Y)ξ)‖, the identity for general almost contact
/// pseudo-metric 3-manifolds.
double general_nabla_phi_residual(const StructureTensors& m, const Point& p, const Vec3& x, const Vec3& y);

/// ‖N_φ(X,Y) + 2dη(X,Y)ξ‖ with dη(X,Y) = ½(X(η(Y)) − Y(η(X)) − η([X,Y])).
double normality_residual(const StructureTensors& m, const Point& p, const VectorField& x, const VectorField& y);
double normality_residual(const StructureTensors& m, const Point& p, const Vec3& x, const Vec3& y);

/// max |Γᵏᵢⱼ − Γᵏⱼᵢ|
double torsion_residual(const Christoffel& gamma);

/// max |∂ₖg_ij − Γˡₖᵢ g_lj − Γˡₖⱼ g_il| with finite-difference metric partials.
double metric_compatibility_residual(const StructureTensors& m, const ConnectionField& conn, const Point& p);

struct QuasiSasakianReport {
  bool quasi_sasakian = false;
  double max_abs_beta = 0.0;
  double max_abs_xi_alpha = 0.0;
};

/// β = 0 and ξ(α) = 0 on every probe (ξ(α) by differentiating α along ξ).
QuasiSasakianReport check_quasi_sasakian(const StructureTensors& m, const std::vector<Point>& probes, double tol);

}  // namespace acpm
