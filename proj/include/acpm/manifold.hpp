#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "acpm/types.hpp"

namespace acpm {

enum class BuiltinKind { none, n3, q3 };

/// Coordinate box used to draw verification probes; intersected with the chart domain.
struct ProbeBox {
  Vec3 lo{-1, -1, -1};
  Vec3 hi{1, 1, 1};
};

/// An almost contact pseudo-metric structure (φ, ξ, η, g, ε) on one chart of ℝ³.
///
/// Every field is a pure evaluator. `phi(p)` is the matrix of φ in the coordinate frame, so
/// column j holds the components of φ∂ⱼ. The optional members carry exact derivative data;
/// when empty, consumers fall back to Richardson-extrapolated central differences.
struct StructureTensors {
  std::string name;
  BuiltinKind kind = BuiltinKind::none;
  int epsilon = 1;

  std::function<Mat3(const Point&)> metric;
  std::function<Mat3(const Point&)> phi;
  std::function<Vec3(const Point&)> xi;
  std::function<Vec3(const Point&)> eta;
  std::function<bool(const Point&)> chart_domain;
  ProbeBox probe_box;

  /// ∂ₗ g_ij as `[l](i, j)`.
  std::function<std::array<Mat3, 3>(const Point&)> metric_partials;
  /// Closed-form Levi-Civita table.
  std::function<Christoffel(const Point&)> christoffel_table;
  /// ∂ₗ of φ as `[l]`, and Jacobians J(k, l) = ∂ₗ Vᵏ of ξ and ∂ₗ η_k of η.
  std::function<std::array<Mat3, 3>(const Point&)> phi_partials;
  std::function<Mat3(const Point&)> xi_jacobian;
  std::function<Mat3(const Point&)> eta_jacobian;

  bool contains(const Point& p) const { return !chart_domain || chart_domain(p); }

  double g(const Point& p, const Vec3& a, const Vec3& b) const { return a.dot(metric(p) * b); }
};

/// Throws DomainError when p lies outside the chart.
void require_in_domain(const StructureTensors& m, const Point& p);

/// The built-in global charts: "n3" (N³_ε) and "q3" (Q³_α, chart x > 0).
StructureTensors builtin_manifold(const std::string& name, int epsilon);

/// Expression-backed structure. Component strings are in x, y, z; matrices are row-major
/// (metric[3*i + j] = g_ij, phi[3*k + j] = k-th component of φ∂ⱼ). `domain`, when nonempty,
/// is an expression that must be strictly positive inside the chart.
struct UserStructureSpec {
  std::string name = "user";
  int epsilon = 1;
  std::array<std::string, 9> metric;
  std::array<std::string, 9> phi;
  std::array<std::string, 3> xi;
  std::array<std::string, 3> eta;
  std::string domain;
  ProbeBox probe_box;
};

/// Validates symmetry of the metric strings (g_ij and g_ji must evaluate equal at a sample
/// of points) and builds exact derivative data by symbolic differentiation.
StructureTensors user_manifold(const UserStructureSpec& spec);

/// Seeded probe points inside the probe box and the chart domain.
std::vector<Point> probe_points(const StructureTensors& m, int count, unsigned long long seed);

enum class CausalCharacter { spacelike, timelike, null };

const char* to_string(CausalCharacter c);

struct AxiomResidual {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct StructureReport {
  std::vector<AxiomResidual> axioms;
  double tol = 0.0;

  bool pass() const;
  double residual(const std::string& name) const;
};

/// ‖φ²+I−η⊗ξ‖, |η(ξ)−1|, ‖φξ‖, ‖η∘φ‖ (max over probes; max-abs entry norms).
StructureReport check_almost_contact(const StructureTensors& m, const std::vector<Point>& probes, double tol);

/// |g(φX,φY) − g(X,Y) + εη(X)η(Y)| over the coordinate basis pairs, |η(X) − εg(X,ξ)|,
/// and |g(ξ,ξ) − ε|.
StructureReport check_compatibility(const StructureTensors& m, const std::vector<Point>& probes, double tol);

/// Φ(X,Y) = ε g(X, φY).
double fundamental_two_form(const StructureTensors& m, const Point& p, const TangentVector& x,
                            const TangentVector& y);

/// Sign of g(X,X) with the zero band |g(X,X)| ≤ tol·‖X‖².
CausalCharacter causal_character(const StructureTensors& m, const Point& p, const Vec3& x, double tol = 1e-9);

/// det of φ restricted to a basis of ker η, and the eigenvalue signs of g (ascending order).
double phi_rank_determinant(const StructureTensors& m, const Point& p);
std::array<int, 3> metric_signature(const StructureTensors& m, const Point& p);

}  // namespace acpm
