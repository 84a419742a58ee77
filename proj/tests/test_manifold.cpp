#include <cmath>

#include "acpm/errors.hpp"
#include "acpm/manifold.hpp"
#include "doctest.h"

using namespace acpm;

namespace {

void check_matrix(const Mat3& actual, const Mat3& expected, double tol = 1e-14) {
  CHECK((actual - expected).cwiseAbs().maxCoeff() < tol);
}

}  // namespace

TEST_CASE("built-in metrics at reference points") {
  Mat3 n3;
  n3 << 5, 0, 2, 0, 1, 0, 2, 0, 1;
  check_matrix(builtin_manifold("n3", 1).metric(Point(0, 1, 0)), n3);

  Mat3 q3;
  q3 << 4, 0, 0, 0, 20, -4, 0, -4, 1;
  check_matrix(builtin_manifold("q3", 1).metric(Point(2, 0, 0)), q3);
}

TEST_CASE("built-in chart domains and errors") {
  const auto q3 = builtin_manifold("q3", -1);
  CHECK(q3.contains(Point(0.5, 1, 1)));
  CHECK_FALSE(q3.contains(Point(-1, 0, 0)));
  CHECK_THROWS_AS(require_in_domain(q3, Point(-1, 0, 0)), DomainError);
  CHECK_THROWS_AS(builtin_manifold("s3", 1), ValidationError);
  CHECK_THROWS_AS(builtin_manifold("n3", 0), ValidationError);
}

TEST_CASE("axioms and compatibility hold on both built-ins") {
  for (const char* name : {"n3", "q3"})
    for (int eps : {1, -1}) {
      const auto m = builtin_manifold(name, eps);
      const auto probes = probe_points(m, 100, 42);
      const auto ac = check_almost_contact(m, probes, 1e-10);
      const auto cp = check_compatibility(m, probes, 1e-10);
      CHECK(ac.pass());
      CHECK(cp.pass());
      for (const auto& a : ac.axioms) CHECK(a.residual < 1e-12);
      CHECK(cp.residual("xi_norm") < 1e-12);
      for (const auto& p : probes) {
        CHECK(std::abs(phi_rank_determinant(m, p)) > 1e-10);
        const auto sig = metric_signature(m, p);
        if (eps == 1) CHECK(sig == std::array<int, 3>{1, 1, 1});
        else CHECK(sig == std::array<int, 3>{-1, 1, 1});
      }
    }
}

TEST_CASE("N3 axiom sample by hand") {
  const auto m = builtin_manifold("n3", 1);
  const Point p(0, 1, 0);
  const Mat3 f = m.phi(p);
  const Vec3 lhs = f * (f * Vec3::UnitX());
  const Vec3 rhs = -Vec3::UnitX() + m.eta(p).dot(Vec3::UnitX()) * m.xi(p);
  CHECK((lhs - rhs).norm() < 1e-15);
  CHECK((lhs - Vec3(-1, 0, 2)).norm() < 1e-15);
}

TEST_CASE("corrupted phi fails the axiom check") {
  auto m = builtin_manifold("n3", 1);
  const auto phi = m.phi;
  m.phi = [phi](const Point& p) {
    Mat3 f = phi(p);
    f.col(1) = -f.col(1);
    return f;
  };
  const auto report = check_almost_contact(m, probe_points(m, 10, 1), 1e-10);
  CHECK_FALSE(report.pass());
  CHECK(report.residual("phi_squared") >= 1.0);
}

TEST_CASE("probes outside the chart are rejected") {
  const auto m = builtin_manifold("q3", 1);
  CHECK_THROWS_AS(check_almost_contact(m, {Point(-1, 0, 0)}, 1e-10), DomainError);
}

TEST_CASE("compatibility on the basis pair (d1, d2)") {
  const auto m = builtin_manifold("n3", 1);
  const Point p(1, 1, 0);
  const Mat3 f = m.phi(p);
  const Vec3 x = Vec3::UnitX(), y = Vec3::UnitY();
  const double r = m.g(p, f * x, f * y) - m.g(p, x, y) + m.epsilon * m.eta(p).dot(x) * m.eta(p).dot(y);
  CHECK(std::abs(r) < 1e-12);
  const Vec3 xi = m.xi(p);
  CHECK(std::abs(m.g(p, f * xi, f * xi)) < 1e-15);
}

TEST_CASE("fundamental two-form") {
  const auto m = builtin_manifold("n3", 1);
  const Point o(0, 0, 0);
  CHECK(fundamental_two_form(m, o, {o, Vec3::UnitX()}, {o, Vec3::UnitY()}) == doctest::Approx(-1.0));
  CHECK(fundamental_two_form(m, o, {o, Vec3(1, 2, 3)}, {o, Vec3(1, 2, 3)}) == doctest::Approx(0.0));
  for (const auto& p : probe_points(m, 20, 3)) {
    const double a = fundamental_two_form(m, p, {p, Vec3::UnitX()}, {p, Vec3::UnitY()});
    const double b = fundamental_two_form(m, p, {p, Vec3::UnitY()}, {p, Vec3::UnitX()});
    CHECK(std::abs(a + b) < 1e-12);
  }
  CHECK_THROWS_AS(fundamental_two_form(m, o, {Point(1, 0, 0), Vec3::UnitX()}, {o, Vec3::UnitY()}), ValidationError);
}

TEST_CASE("causal character") {
  const auto plus = builtin_manifold("n3", 1);
  const auto minus = builtin_manifold("q3", -1);
  const Point p(1, 0, 0);
  CHECK(causal_character(plus, p, plus.xi(p)) == CausalCharacter::spacelike);
  CHECK(causal_character(minus, p, minus.xi(p)) == CausalCharacter::timelike);
  CHECK(causal_character(minus, p, Vec3(1, 0, 1)) == CausalCharacter::null);
  CHECK_THROWS_AS(causal_character(minus, p, Vec3::Zero()), ValidationError);
}

TEST_CASE("user-defined structure reproduces the N3 built-in") {
  UserStructureSpec s;
  s.epsilon = 1;
  s.metric = {"exp(2*z) + 4*y^2", "0", "2*y", "0", "exp(2*z)", "0", "2*y", "0", "1"};
  s.phi = {"0", "-1", "0", "1", "0", "0", "0", "2*y", "0"};
  s.xi = {"0", "0", "1"};
  s.eta = {"2*y", "0", "1"};
  s.probe_box = {Vec3(-2, -2, -1), Vec3(2, 2, 1)};
  const auto user = user_manifold(s);
  const auto builtin = builtin_manifold("n3", 1);
  for (const auto& p : probe_points(builtin, 20, 5)) {
    check_matrix(user.metric(p), builtin.metric(p), 1e-12);
    check_matrix(user.phi(p), builtin.phi(p), 1e-12);
  }
  CHECK(check_almost_contact(user, probe_points(user, 20, 1), 1e-10).pass());

  s.metric[1] = "1";
  CHECK_THROWS_AS(user_manifold(s), ValidationError);
}
