#include <cmath>

#include "acpm/connection.hpp"
#include "acpm/errors.hpp"
#include "doctest.h"

using namespace acpm;

namespace {

StructureTensors flat_structure() {
  StructureTensors m;
  m.name = "flat";
  m.epsilon = 1;
  m.metric = [](const Point&) { return Mat3::Identity().eval(); };
  m.phi = [](const Point&) {
    Mat3 f = Mat3::Zero();
    f(1, 0) = 1;
    f(0, 1) = -1;
    return f;
  };
  m.xi = [](const Point&) { return Vec3::UnitZ().eval(); };
  m.eta = [](const Point&) { return Vec3::UnitZ().eval(); };
  return m;
}

const Vec3 kBasis[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};

}  // namespace

TEST_CASE("flat metric has vanishing symbols") {
  const auto m = flat_structure();
  const auto c = ConnectionField::closed_form(m);
  CHECK(c.source() == ConnectionSource::finite_difference);
  const auto gamma = c.at(Point(0.3, -1, 2));
  for (int k = 0; k < 3; ++k) CHECK(gamma.upper[k].cwiseAbs().maxCoeff() < 1e-12);
  CHECK(covariant_derivative(m, Point(0, 0, 0), constant_field(Vec3(1, 2, 3)), constant_field(Vec3(4, 5, 6))).norm() <
        1e-12);
}

TEST_CASE("closed-form tables") {
  for (int eps : {1, -1}) {
    const auto q3 = builtin_manifold("q3", eps);
    CHECK(christoffel(q3, Point(2, 0, 0))(0, 0, 0) == doctest::Approx(0.5));
    const auto n3 = builtin_manifold("n3", eps);
    const auto g = christoffel(n3, Point(0.4, 0.7, -0.2));
    for (int k = 0; k < 3; ++k) CHECK(g(k, 2, 2) == 0.0);
  }
  const auto q3 = builtin_manifold("q3", 1);
  const Vec3 v = covariant_derivative(q3, Point(1, 0, 0), coordinate_field(0), coordinate_field(2));
  CHECK((v - Vec3(0, -1, -2)).norm() < 1e-14);
}

TEST_CASE("N3: nabla_{d2} d3 matches the closed form") {
  for (int eps : {1, -1}) {
    const auto m = builtin_manifold("n3", eps);
    for (const auto& p : probe_points(m, 20, 11)) {
      const double e = std::exp(-2 * p.z());
      const Vec3 expected(eps * e, 1, -2 * eps * p.y() * e);
      CHECK((covariant_derivative(m, p, coordinate_field(1), coordinate_field(2)) - expected).norm() < 1e-8);
    }
  }
}

TEST_CASE("closed-form and finite-difference symbols agree; torsion and compatibility") {
  for (const char* name : {"n3", "q3"})
    for (int eps : {1, -1}) {
      const auto m = builtin_manifold(name, eps);
      const auto exact = ConnectionField::closed_form(m);
      const auto fd = ConnectionField::finite_difference(m);
      double worst = 0.0;
      for (const auto& p : probe_points(m, 100, 17)) {
        const auto a = exact.at(p), b = fd.at(p);
        for (int k = 0; k < 3; ++k) worst = std::max(worst, (a.upper[k] - b.upper[k]).cwiseAbs().maxCoeff());
        CHECK(torsion_residual(a) < 1e-8);
        CHECK(torsion_residual(b) < 1e-6);
        CHECK(metric_compatibility_residual(m, exact, p) < 1e-6);
        CHECK(metric_compatibility_residual(m, fd, p) < 1e-6);
      }
      CHECK(worst < 1e-6);
    }
}

TEST_CASE("alpha and beta on the built-ins") {
  for (int eps : {1, -1}) {
    const auto n3 = builtin_manifold("n3", eps);
    for (const auto& p : probe_points(n3, 30, 2)) {
      const auto ab = alpha_beta(n3, p);
      CHECK(std::abs(ab.alpha - std::exp(-2 * p.z())) < 1e-8);
      CHECK(std::abs(ab.beta - eps) < 1e-8);
    }
    const auto q3 = builtin_manifold("q3", eps);
    const auto ab = alpha_beta(q3, Point(2, 0.3, -1));
    CHECK(ab.alpha == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(ab.beta) < 1e-12);
    for (const auto& p : probe_points(q3, 100, 3)) CHECK(std::abs(alpha_beta(q3, p).beta) < 1e-10);
  }
}

TEST_CASE("finite-difference connection gives the same alpha, beta") {
  const auto m = builtin_manifold("n3", -1);
  const auto fd = ConnectionField::finite_difference(m);
  const Point p(0.5, -0.3, 0.2);
  const auto ab = alpha_beta(m, fd, p);
  CHECK(std::abs(ab.alpha - std::exp(-0.4)) < 1e-7);
  CHECK(std::abs(ab.beta + 1) < 1e-7);
}

TEST_CASE("normal-structure identities") {
  for (const char* name : {"n3", "q3"})
    for (int eps : {1, -1}) {
      const auto m = builtin_manifold(name, eps);
      const auto fd = ConnectionField::finite_difference(m);
      for (const auto& p : probe_points(m, 20, 23)) {
        CHECK(nabla_xi_residual(m, p, m.xi(p)) < 1e-8);
        for (const auto& x : kBasis) {
          CHECK(nabla_xi_residual(m, p, x) < 1e-7);
          CHECK(phi_commutation_residual(m, p, x) < 1e-7);
          for (const auto& y : kBasis) {
            CHECK(nabla_phi_residual(m, p, x, y) < 1e-7);
            CHECK(nabla_phi_residual(m, fd, p, x, y) < 1e-6);
            CHECK(general_nabla_phi_residual(m, p, x, y) < 1e-7);
          }
        }
        CHECK(nabla_phi_residual(m, p, m.xi(p), m.xi(p)) < 1e-8);
      }
    }
}

TEST_CASE("normality on coordinate pairs") {
  for (const char* name : {"n3", "q3"})
    for (int eps : {1, -1}) {
      const auto m = builtin_manifold(name, eps);
      for (const auto& p : probe_points(m, 50, 29))
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const double r = normality_residual(m, p, coordinate_field(i), coordinate_field(j));
            CHECK(r < 1e-8);
            if (i == j) CHECK(r == 0.0);
          }
    }
}

TEST_CASE("normality fails for a non-normal perturbation") {
  auto m = builtin_manifold("n3", 1);
  // Adding z dx to η changes dη(∂₁, ∂₃) while φ stays put, so N_φ + 2dη⊗ξ no longer vanishes.
  m.eta = [](const Point& p) { return Vec3(2 * p.y() + p.z(), 0, 1); };
  m.eta_jacobian = nullptr;
  double worst = 0.0;
  for (const auto& p : probe_points(m, 10, 4))
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        worst = std::max(worst, normality_residual(m, p, coordinate_field(i), coordinate_field(j)));
  CHECK(worst > 1e-3);
}

TEST_CASE("quasi-Sasakian detection") {
  for (int eps : {1, -1}) {
    const auto q3 = builtin_manifold("q3", eps);
    CHECK(check_quasi_sasakian(q3, probe_points(q3, 100, 8), 1e-8).quasi_sasakian);
    const auto n3 = builtin_manifold("n3", eps);
    const auto r = check_quasi_sasakian(n3, probe_points(n3, 100, 8), 1e-8);
    CHECK_FALSE(r.quasi_sasakian);
    CHECK(r.max_abs_beta == doctest::Approx(1.0));
  }
  const auto flat = flat_structure();
  CHECK(check_quasi_sasakian(flat, {Point(0, 0, 0), Point(1, 2, 3)}, 1e-8).quasi_sasakian);
}

TEST_CASE("pseudo-orthonormal basis") {
  const auto m = builtin_manifold("q3", -1);
  const Point p(1.3, 0.2, -0.4);
  const auto basis = pseudo_orthonormal_basis(m, p);
  int negatives = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? basis.signs[i] : 0.0;
      CHECK(std::abs(m.g(p, basis.vectors[i], basis.vectors[j]) - expected) < 1e-12);
    }
    negatives += basis.signs[i] < 0;
  }
  CHECK(negatives == 1);
}
