#include <cmath>

#include "acpm/errors.hpp"
#include "acpm/frenet.hpp"
#include "acpm/legendre.hpp"
#include "acpm/numeric.hpp"
#include "doctest.h"
#include "test_curves.hpp"

using namespace acpm;

namespace {

double upsilon1_kappa(double s, int eps) { return std::sqrt(std::abs(1 + 4 * eps * s * s)); }
double upsilon1_tau(double s, int eps) {
  const double k = upsilon1_kappa(s, eps);
  return std::abs(1 - 2 * eps / (k * k));
}

}  // namespace

TEST_CASE("upsilon1 curvature and torsion") {
  const auto n3 = builtin_manifold("n3", 1);
  const auto c = builtin_legendre("upsilon1");
  const double kappa[] = {1, std::sqrt(5.0), std::sqrt(17.0)};
  const double tau[] = {1, 0.6, std::abs(1 - 2.0 / 17)};
  for (int i = 0; i < 3; ++i) {
    const double s = i;
    const auto f = frenet_direct(n3, c, s);
    const auto lk = legendre_kappa_tau(n3, c, s);
    CHECK(f.kappa == doctest::Approx(kappa[i]).epsilon(1e-9));
    CHECK(f.tau == doctest::Approx(tau[i]).epsilon(1e-7));
    CHECK(lk.kappa == doctest::Approx(kappa[i]).epsilon(1e-12));
    CHECK(lk.tau == doctest::Approx(tau[i]).epsilon(1e-8));
    CHECK(lk.theta == doctest::Approx(-2 * s));
    CHECK(std::abs(f.kappa - lk.kappa) < 1e-5);
    CHECK(std::abs(f.tau - lk.tau) < 1e-5);
  }
}

TEST_CASE("upsilon2 curvature and torsion") {
  const auto n3 = builtin_manifold("n3", 1);
  const auto c = builtin_legendre("upsilon2");
  for (double s : {1.0, 2.0, 4.0}) {
    const auto f = frenet_direct(n3, c, s);
    const auto lk = legendre_kappa_tau(n3, c, s);
    CHECK(f.kappa == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.tau == doctest::Approx(1 / (s * s)).epsilon(1e-7));
    CHECK(std::abs(lk.theta) < 1e-12);
    CHECK(lk.kappa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lk.tau == doctest::Approx(1 / (s * s)).epsilon(1e-8));
  }
}

TEST_CASE("upsilon1 with timelike Reeb field") {
  const int eps = -1;
  const auto n3 = builtin_manifold("n3", eps);
  const auto c = builtin_legendre("upsilon1");
  for (double s : {-1.3, -0.2, 0.1, 0.9, 1.6}) {
    const auto lk = legendre_kappa_tau(n3, c, s);
    const auto f = frenet_direct(n3, c, s);
    CHECK(lk.kappa == doctest::Approx(upsilon1_kappa(s, eps)).epsilon(1e-12));
    CHECK(f.kappa == doctest::Approx(lk.kappa).epsilon(1e-8));
    CHECK(f.sign_n * f.sign_b == eps);
    // With θ² + εβ² < 0 the normal is timelike and the two torsion forms differ in sign.
    const bool timelike_normal = 4 * s * s < 1;
    CHECK(lk.forms_disagree == timelike_normal);
    CHECK(f.sign_n == (timelike_normal ? -1 : 1));
    CHECK(std::abs(f.tau_signed - lk.tau_signed_alt) < 1e-6);
    CHECK(lk.tau == doctest::Approx(upsilon1_tau(s, eps)).epsilon(1e-8));
    CHECK(frenet_residuals(n3, c, f).max() < 1e-5);
  }
}

TEST_CASE("frenet_direct preconditions") {
  const auto q3 = builtin_manifold("q3", 1);
  const auto reeb_line = expression_curve("reeb", {"1", "0", "s"}, -1, 1);
  CHECK_THROWS_AS(frenet_direct(q3, reeb_line, 0.2), GeodesicError);
  const auto slow = expression_curve("slow", {"1", "0", "s/2"}, -1, 1);
  CHECK_THROWS_AS(frenet_direct(q3, slow, 0.2), HypothesisError);
  CHECK_THROWS_AS(legendre_kappa_tau(builtin_manifold("n3", 1), testing::generic_n3_curve(), 0.5),
                  NotLegendreError);
}

TEST_CASE("Frenet system and orthonormality along test curves") {
  const auto n3 = builtin_manifold("n3", 1);
  const auto check_curve = [&](const Curve& c, double lo, double hi) {
    for (double s : numeric::uniform_grid(lo, hi, 41)) {
      const auto f = frenet_direct(n3, c, s);
      const auto r = frenet_residuals(n3, c, f);
      CHECK(r.orthonormality < 1e-7);
      CHECK(r.tangent < 1e-5);
      CHECK(r.normal < 1e-5);
      CHECK(r.binormal < 1e-5);
    }
  };
  check_curve(builtin_legendre("upsilon1"), -2, 2);
  check_curve(builtin_legendre("upsilon2"), 0.3, 4);
  check_curve(testing::generic_n3_curve(), -2.5, 2.5);
}

TEST_CASE("Reeb decomposition for Legendre curves") {
  const auto n3 = builtin_manifold("n3", 1);
  const auto u2 = reeb_decomposition_legendre(n3, builtin_legendre("upsilon2"), 1.7);
  CHECK(u2.coeff_n == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(u2.coeff_b) < 1e-10);
  const auto u1 = builtin_legendre("upsilon1");
  const auto at0 = reeb_decomposition_legendre(n3, u1, 0.0);
  CHECK(at0.coeff_n == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(at0.coeff_b) < 1e-10);
  for (double s : numeric::uniform_grid(-1, 1, 41)) CHECK(reeb_decomposition_legendre(n3, u1, s).residual < 1e-6);
}

TEST_CASE("V-frame") {
  const auto n3 = builtin_manifold("n3", 1);
  SUBCASE("Legendre curve") {
    const auto m = builtin_manifold("n3", 1);
    const auto c = builtin_legendre("upsilon1");
    const auto v = vframe(m, c, 0.4);
    const Point p = c.position(0.4);
    CHECK(v.delta == 1.0);
    CHECK((v.V2 - m.phi(p) * c.jet(0.4).d1).norm() < 1e-14);
    CHECK((v.V3 - m.xi(p)).norm() < 1e-14);
    CHECK(vframe_derivative_residuals(m, c, 0.4).e1 < 1e-6);
  }
  SUBCASE("velocity along the Reeb field") {
    const auto q3 = builtin_manifold("q3", 1);
    CHECK_THROWS_AS(vframe(q3, expression_curve("reeb", {"1", "0", "s"}, -1, 1), 0.0), DegenerateError);
  }
  SUBCASE("generic curve") {
    const auto c = testing::generic_n3_curve();
    for (double s : numeric::uniform_grid(-2.5, 2.5, 50)) {
      const auto v = vframe(n3, c, s);
      CHECK(v.dxi_residual < 1e-8);
      CHECK(v.orthonormality < 1e-7);
      const auto e = vframe_derivative_residuals(n3, c, s);
      CHECK(e.max() < 1e-6);
    }
  }
  SUBCASE("geodesic transversal to the Reeb field in Q3") {
    const auto q3 = builtin_manifold("q3", 1);
    const auto g = geodesic_curve(q3, Point(1, 0, 0), Vec3(0.8, 0, 0.6), 0.0, -0.5, 0.5);
    for (double s : {-0.3, 0.0, 0.2}) {
      const auto v = vframe(q3, g, s);
      CHECK(std::abs(v.theta1) < 1e-8);
      CHECK(vframe_derivative_residuals(q3, g, s).max() < 1e-8);
    }
  }
}

TEST_CASE("three-way curvature and torsion agreement") {
  const auto n3 = builtin_manifold("n3", 1);
  for (const char* name : {"upsilon1", "upsilon2"}) {
    const auto c = builtin_legendre(name);
    const double lo = std::string(name) == "upsilon1" ? -2 : 0.3;
    for (double s : numeric::uniform_grid(lo, 3, 41)) {
      const auto lk = legendre_kappa_tau(n3, c, s);
      const auto gk = general_kappa_tau(n3, c, s);
      const auto f = frenet_direct(n3, c, s);
      CHECK(std::abs(lk.kappa - gk.kappa) < 1e-10);
      CHECK(std::abs(lk.tau - gk.tau) < 1e-10);
      CHECK(std::abs(f.kappa - gk.kappa) < 1e-5);
      CHECK(std::abs(f.tau - gk.tau) < 1e-5);
    }
  }
  const auto c = testing::generic_n3_curve();
  for (double s : numeric::uniform_grid(-2.5, 2.5, 41)) {
    const auto gk = general_kappa_tau(n3, c, s);
    const auto f = frenet_direct(n3, c, s);
    CHECK(std::abs(f.kappa - gk.kappa) < 1e-5);
    CHECK(std::abs(f.tau - gk.tau) < 1e-5);
    CHECK(std::abs(f.tau_signed - gk.tau_signed) < 1e-5);
  }
}

TEST_CASE("torsion on a quasi-Sasakian manifold with beta = 0") {
  const auto q3 = builtin_manifold("q3", 1);
  const auto c = testing::generic_q3_curve();
  for (double s : numeric::uniform_grid(-2, 2, 21)) {
    const auto gk = general_kappa_tau(q3, c, s);
    auto theta1 = [&](double t) { return general_kappa_tau(q3, c, t).theta1; };
    auto mixed = [&](double t) {
      const auto g = general_kappa_tau(q3, c, t);
      return g.m_prime * g.theta1 / (g.delta * g.delta);
    };
    const double d2 = gk.delta * gk.delta;
    const double alpha = alpha_beta(q3, c.position(s)).alpha;
    const double num = -2 * gk.m_prime * c.differentiate(theta1, s) / d2 + c.differentiate(mixed, s);
    const double den = gk.theta1 * gk.theta1 + q3.epsilon * std::pow(gk.m_prime / d2, 2);
    const double tau = std::abs(alpha + gk.m * gk.theta1 + num / den);
    CHECK(std::abs(gk.tau - tau) < 1e-8);
    const auto f = frenet_direct(q3, c, s);
    CHECK(std::abs(f.tau - gk.tau) < 1e-5);
    CHECK(std::abs(f.kappa - gk.kappa) < 1e-5);
  }
}

TEST_CASE("general Reeb decomposition") {
  SUBCASE("identity along the generic curve") {
    const auto n3 = builtin_manifold("n3", 1);
    const auto c = testing::generic_n3_curve();
    for (double s : numeric::uniform_grid(-2.5, 2.5, 50)) {
      const auto r = reeb_decomposition_general(n3, c, s);
      CHECK(r.identity_residual < 1e-7);
      CHECK(r.residual < 1e-6);
      CHECK(r.delta * r.delta - n3.epsilon * r.eta_n * r.eta_n >= -1e-7);
    }
  }
  SUBCASE("upsilon2 reproduces the Legendre decomposition") {
    const auto n3 = builtin_manifold("n3", 1);
    const auto r = reeb_decomposition_general(n3, builtin_legendre("upsilon2"), 2.0);
    CHECK(r.eta_n == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(std::abs(r.eta_b) < 1e-8);
  }
  SUBCASE("Legendre curve in Q3") {
    const auto q3 = builtin_manifold("q3", 1);
    const auto gen = generate_legendre_q3(AngleFunction::parse("s", 0.0), 0.1, 3.0);
    for (double s : {0.5, 1.2, 2.4}) {
      const auto r = reeb_decomposition_general(q3, gen.curve, s);
      CHECK(std::abs(r.eta_n) < 1e-7);
      CHECK(std::abs(std::abs(r.eta_b) - 1) < 1e-7);
      CHECK(r.residual < 1e-6);
    }
  }
  SUBCASE("timelike normal is rejected") {
    const auto n3 = builtin_manifold("n3", -1);
    CHECK_THROWS_AS(reeb_decomposition_general(n3, builtin_legendre("upsilon1"), 0.1), DegenerateError);
  }
}

TEST_CASE("Q3 Legendre torsion equals |alpha|") {
  const auto q3 = builtin_manifold("q3", 1);
  const auto gen = generate_legendre_q3(AngleFunction::parse("s", 0.0), 0.1, 3.0);
  for (double s : numeric::uniform_grid(0.1, 3.0, 41)) {
    const auto f = frenet_direct(q3, gen.curve, s);
    const double alpha = alpha_beta(q3, gen.curve.position(s)).alpha;
    CHECK(std::abs(f.tau - std::abs(alpha)) < 1e-6);
    const auto lk = legendre_kappa_tau(q3, gen.curve, s);
    CHECK(lk.kappa == doctest::Approx(std::abs(lk.theta)).epsilon(1e-12));
    CHECK(std::abs(lk.tau - std::abs(alpha)) < 1e-8);
  }
}

TEST_CASE("null frame") {
  const auto q3 = builtin_manifold("q3", -1);
  const auto c = testing::null_q3_curve();
  for (double s : {-0.3, 0.0, 0.25}) {
    const auto f = build_null_frame(q3, c, s);
    CHECK(f.screen_seed == "phi_T");
    const auto r = null_frame_residuals(q3, c, f);
    CHECK(r.pairings < 1e-8);
    CHECK(r.tangent < 1e-6);
    CHECK(r.screen < 1e-6);
    CHECK(r.transversal < 1e-6);
  }
  const auto f = build_null_frame(q3, c, 0.0);
  CHECK((f.T - Vec3(1, 0, 1)).norm() < 1e-15);

  const auto spacelike = expression_curve("line", {"1 + s", "0", "0"}, -0.5, 0.5);
  CHECK_THROWS_AS(build_null_frame(q3, spacelike, 0.0), HypothesisError);
  CHECK_THROWS_AS(build_null_frame(builtin_manifold("q3", 1), c, 0.0), HypothesisError);
}

TEST_CASE("null geodesic check") {
  const auto q3 = builtin_manifold("q3", -1);
  const auto geo = geodesic_curve(q3, Point(1, 0, 0), Vec3(1, 0, 1), 0.0, -0.4, 0.4);
  const auto grid = numeric::uniform_grid(-0.3, 0.3, 31);
  const auto r = null_legendre_geodesic_check(q3, geo, grid, 1e-8);
  CHECK(r.max_abs_b3 < 1e-8);
  CHECK(r.max_proportionality_defect < 1e-8);
  CHECK_FALSE(r.legendre);
  CHECK_FALSE(r.notes.empty());

  const auto generic = null_legendre_geodesic_check(q3, testing::null_q3_curve(), grid, 1e-8);
  CHECK_FALSE(generic.legendre);
  CHECK(generic.max_abs_m > 0.5);
  CHECK(std::isfinite(generic.max_abs_b3));
}
