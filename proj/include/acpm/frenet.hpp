#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "acpm/connection.hpp"
#include "acpm/curve.hpp"

namespace acpm {

struct FrenetOptions {
  double kappa_min = 1e-7;       // below this ∇_T T counts as zero (geodesic point)
  double delta_min = 1e-7;       // below this the (υ′, φυ′, ξ) frame is degenerate
  double unit_speed_tol = 1e-6;  // |g(υ′, υ′) − 1| accepted as unit speed
  double legendre_tol = 1e-8;    // |η(υ′)| accepted as Legendre
  double null_tol = 1e-8;        // |g(υ′, υ′)| ≤ null_tol·‖υ′‖² accepted as null
};

/// Frenet frame of a unit-speed curve with causal signs carried separately.
///
/// With sN = g(N, N) and sB = g(B, B) (so sN·sB = ε), the frame satisfies
///   ∇_T T = κN,  ∇_T N = −sN κT + ε τ_s B,  ∇_T B = −τ_s N,
/// which is the usual system when sN = +1. τ = |τ_s|.
struct FrenetData {
  double s = 0.0;
  Vec3 T = Vec3::Zero(), N = Vec3::Zero(), B = Vec3::Zero();
  double kappa = 0.0;
  double tau = 0.0;
  double tau_signed = 0.0;
  int sign_n = 1;
  int sign_b = 1;
  /// True when B comes from the (υ′, φυ′, ξ) frame; false for the volume-form fallback used
  /// where that frame degenerates.
  bool structure_adapted = true;
};

/// κ = √|g(∇_T T, ∇_T T)|, N = ∇_T T/κ, and B built from the structure so that τ_s is the
/// pre-absolute-value torsion of the closed-form expressions. Throws GeodesicError when
/// ∇_T T vanishes and DegenerateError when it is null but nonzero.
FrenetData frenet_direct(const StructureTensors& m, const Curve& curve, double s, const FrenetOptions& opt = {});

struct FrenetResiduals {
  double tangent = 0.0;   // ‖∇_T T − κN‖
  double normal = 0.0;    // ‖∇_T N + sN κT − ε τ_s B‖
  double binormal = 0.0;  // ‖∇_T B + τ_s N‖
  double orthonormality = 0.0;

  double max() const;
};

/// Reconstruction residuals of the Frenet system (component max-norms). ∇_T B is taken by
/// differentiating the frame numerically along the curve.
FrenetResiduals frenet_residuals(const StructureTensors& m, const Curve& curve, const FrenetData& f,
                                 const FrenetOptions& opt = {});

struct LegendreKappaTau {
  double kappa = 0.0;
  double tau = 0.0;
  double theta = 0.0;        // g(∇_υ′υ′, φυ′)
  double theta_prime = 0.0;
  double tau_signed = 0.0;   // α + (βθ′ − β′θ)/κ²
  /// α + (βθ′ − β′θ)/(θ² + εβ²): the same quantity with a signed denominator. The two differ
  /// exactly when θ² + εβ² < 0; the direct frame then agrees with this form.
  double tau_signed_alt = 0.0;
  bool forms_disagree = false;
};

/// κ = √|θ² + εβ²| and τ = |α + (βθ′ − β′θ)/κ²| for a Legendre curve.
LegendreKappaTau legendre_kappa_tau(const StructureTensors& m, const Curve& curve, double s,
                                    const FrenetOptions& opt = {});

struct ReebDecomposition {
  double coeff_n = 0.0;
  double coeff_b = 0.0;
  double residual = 0.0;  // ‖ξ − coeff_n N − coeff_b B‖ in the direct frame
};

/// ξ = (ε/κ)(−βN + θB) for a Legendre curve. Requires a spacelike principal normal.
ReebDecomposition reeb_decomposition_legendre(const StructureTensors& m, const Curve& curve, double s,
                                              const FrenetOptions& opt = {});

/// The frame V₁ = υ′, V₂ = φυ′/δ, V₃ = (ξ − εmυ′)/δ with δ = √|1 − εm²|.
struct PhiFrameData {
  double s = 0.0;
  double theta = 0.0;   // g(∇_υ′υ′, φυ′)
  double m = 0.0;
  double delta = 0.0;
  double theta1 = 0.0;  // θ/δ²
  Vec3 V1 = Vec3::Zero(), V2 = Vec3::Zero(), V3 = Vec3::Zero();
  double dxi_residual = 0.0;       // ‖ξ − (εmV₁ + δV₃)‖
  double orthonormality = 0.0;     // max deviation of g(Vᵢ, Vⱼ) from diag(1, 1, ε)
};

PhiFrameData vframe(const StructureTensors& m, const Curve& curve, double s, const FrenetOptions& opt = {});

struct VFrameResiduals {
  double e1 = 0.0;  // ‖∇V₁ − (δθ₁V₂ − (βδ − m′/δ)V₃)‖
  double e2 = 0.0;  // ‖∇V₂ − (−δθ₁V₁ + (α + mθ₁)V₃)‖
  double e3 = 0.0;  // ‖∇V₃ − ε((βδ − m′/δ)V₁ − (α + mθ₁)V₂)‖

  double max() const { return std::max({e1, e2, e3}); }
};

VFrameResiduals vframe_derivative_residuals(const StructureTensors& m, const Curve& curve, double s,
                                            const FrenetOptions& opt = {});

struct GeneralKappaTau {
  double kappa = 0.0;
  double tau = 0.0;
  double tau_signed = 0.0;
  double m = 0.0;
  double m_prime = 0.0;
  double delta = 0.0;
  double theta1 = 0.0;
  double denominator = 0.0;  // θ₁² + ε(β − m′/δ²)²
};

/// κ = δ√|θ₁² + ε(β − m′/δ²)²| and
/// τ = |α + mθ₁ + ((βθ₁′ − β′θ₁) − 2m′θ₁′/δ² + (m′θ₁/δ²)′)/(θ₁² + ε(β − m′/δ²)²)|.
GeneralKappaTau general_kappa_tau(const StructureTensors& m, const Curve& curve, double s,
                                  const FrenetOptions& opt = {});

struct GeneralReebDecomposition {
  double m = 0.0;
  double eta_n = 0.0;  // (m′ − βδ²)/κ
  double eta_b = 0.0;  // ε·sgn(τ)·δ²θ₁/κ
  double delta = 0.0;
  double residual = 0.0;           // ‖ξ − ε(mT + η(N)N) − η(B)B‖ with B oriented by sgn(τ)
  double identity_residual = 0.0;  // |η(B)² + εη(N)² − δ²|
};

/// ξ = ε(mT + η(N)N) + η(B)B. Requires a spacelike principal normal.
GeneralReebDecomposition reeb_decomposition_general(const StructureTensors& m, const Curve& curve, double s,
                                                    const FrenetOptions& opt = {});

/// Null frame {T, U, V}: g(U,U) = 1, g(T,T) = g(V,V) = 0, g(T,V) = −1, g(T,U) = g(U,V) = 0,
/// with ∇_T T = hT + κ₁U, ∇_T U = −τ₁T + κ₁V, ∇_T V = −hV − τ₁U.
struct NullFrameData {
  double s = 0.0;
  Vec3 T = Vec3::Zero(), U = Vec3::Zero(), V = Vec3::Zero();
  double h = 0.0;
  double kappa1 = 0.0;
  double tau1 = 0.0;
  std::string screen_seed;  // which vector fixed the screen: "phi_T", "xi", "d1", "d2" or "d3"
};

/// Deterministic completion of a null tangent: U = φT/|m| when η(T) = m ≠ 0; otherwise V is
/// built from the first transversal seed among ξ, ∂₁, ∂₂, ∂₃ and U spans the orthogonal
/// complement of {T, V}. Requires ε = −1 and a null tangent.
NullFrameData build_null_frame(const StructureTensors& m, const Curve& curve, double s, const FrenetOptions& opt = {});

struct NullFrameResiduals {
  double pairings = 0.0;  // max deviation from the pairing table
  double tangent = 0.0;   // ‖∇_T T − (hT + κ₁U)‖
  double screen = 0.0;    // ‖∇_T U − (−τ₁T + κ₁V)‖
  double transversal = 0.0;  // ‖∇_T V − (−hV − τ₁U)‖
};

NullFrameResiduals null_frame_residuals(const StructureTensors& m, const Curve& curve, const NullFrameData& f,
                                        const FrenetOptions& opt = {});

struct NullGeodesicReport {
  bool legendre = false;
  double max_abs_m = 0.0;
  double max_abs_b3 = 0.0;                  // ∇_υ′υ′ = a₃υ′ + b₃U
  double max_proportionality_defect = 0.0;  // ‖∇_υ′υ′ − a₃υ′‖
  std::vector<std::string> notes;
};

NullGeodesicReport null_legendre_geodesic_check(const StructureTensors& m, const Curve& curve,
                                                const std::vector<double>& grid, double tol,
                                                const FrenetOptions& opt = {});

}  // namespace acpm
