// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "acpm/cli.hpp"
#include "acpm/connection.hpp"
#include "acpm/errors.hpp"
#include "acpm/expr.hpp"
#include "acpm/frenet.hpp"
#include "acpm/legendre.hpp"
#include "acpm/spherical.hpp"
#include "random_expr.hpp"
#include "test_curves.hpp"

using namespace acpm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Mat3 kBasis = Mat3::Identity();

Outcome structure_verification() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double axioms = 0.0, compat = 0.0, normal = 0.0;
  for (const char* name : {"n3", "q3"}) {
    for (int eps : {1, -1}) {
      const auto m = builtin_manifold(name, eps);
      const auto probes = probe_points(m, 100, 2024);
      for (const auto& a : check_almost_contact(m, probes, 1e-10).axioms) axioms = std::max(axioms, a.residual);
      for (const auto& a : check_compatibility(m, probes, 1e-10).axioms) compat = std::max(compat, a.residual);
      for (const auto& p : probes)
        for (int i = 0; i < 3; ++i)
          for (int j = i + 1; j < 3; ++j) normal = std::max(normal, normality_residual(m, p, kBasis.col(i), kBasis.col(j)));
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(axioms < 1e-10, "almost contact residual");
  o.require(compat < 1e-10, "compatibility residual");
  o.require(normal < 1e-8, "normality residual");
  o.require(elapsed < 5.0, "runtime");
  o.detail = fmt("axioms %.2e, compatibility %.2e, normality %.2e, ", axioms, compat, normal) +
             fmt("%.3f s", elapsed) + (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

Outcome alpha_beta_extraction() {
  Outcome o;
  double n3_alpha = 0.0, n3_beta = 0.0, q3_alpha = 0.0, q3_beta = 0.0;
  bool qs_q3 = true, qs_n3 = false;
  for (int eps : {1, -1}) {
    const auto n3 = builtin_manifold("n3", eps);
    const auto q3 = builtin_manifold("q3", eps);
    const auto pn = probe_points(n3, 100, 31), pq = probe_points(q3, 100, 31);
    for (const auto& p : pn) {
      const auto ab = alpha_beta(n3, p);
      n3_alpha = std::max(n3_alpha, std::abs(ab.alpha - std::exp(-2 * p.z())));
      n3_beta = std::max(n3_beta, std::abs(ab.beta - eps));
    }
    for (const auto& p : pq) {
      const auto ab = alpha_beta(q3, p);
      q3_alpha = std::max(q3_alpha, std::abs(ab.alpha - 1 / (p.x() * p.x())));
      q3_beta = std::max(q3_beta, std::abs(ab.beta));
    }
    qs_q3 = qs_q3 && check_quasi_sasakian(q3, pq, 1e-8).quasi_sasakian;
    qs_n3 = qs_n3 || check_quasi_sasakian(n3, pn, 1e-8).quasi_sasakian;
  }
  o.require(n3_alpha < 1e-7 && n3_beta < 1e-7, "N3 alpha/beta");
  o.require(q3_alpha < 1e-7 && q3_beta < 1e-10, "Q3 alpha/beta");
  o.require(qs_q3 && !qs_n3, "quasi-Sasakian verdicts");
  o.detail = fmt("N3 |da| %.2e |db| %.2e, ", n3_alpha, n3_beta) + fmt("Q3 |da| %.2e |b| %.2e, ", q3_alpha, q3_beta) +
             "quasi-Sasakian Q3=" + (qs_q3 ? "true" : "false") + " N3=" + (qs_n3 ? "true" : "false") +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

Outcome example_curves() {
  Outcome o;
  const auto n3 = builtin_manifold("n3", 1);
  double worst_value = 0.0, worst_cross = 0.0;
  auto check = [&](const Curve& c, double s, double kappa, double tau) {
    const auto lk = legendre_kappa_tau(n3, c, s);
    const auto f = frenet_direct(n3, c, s);
    for (double v : {lk.kappa - kappa, f.kappa - kappa, lk.tau - tau, f.tau - tau})
      worst_value = std::max(worst_value, std::abs(v));
    worst_cross = std::max({worst_cross, std::abs(lk.kappa - f.kappa), std::abs(lk.tau - f.tau)});
  };
  const auto u1 = builtin_legendre("upsilon1"), u2 = builtin_legendre("upsilon2");
  check(u1, 0, 1, 1);
  check(u1, 1, std::sqrt(5.0), 0.6);
  check(u1, 2, std::sqrt(17.0), std::abs(1 - 2.0 / 17));
  for (double s : {1.0, 2.0, 4.0}) check(u2, s, 1, 1 / (s * s));
  o.require(worst_value < 1e-5, "reference values");
  o.require(worst_cross < 1e-5, "cross-agreement");
  o.detail = fmt("max value error %.2e, max cross-path gap %.2e", worst_value, worst_cross);
  return o;
}

Outcome three_way_oracle() {
  Outcome o;
  const auto n3 = builtin_manifold("n3", 1);
  double worst = 0.0;
  int samples = 0;
  const std::tuple<Curve, double, double, bool> cases[] = {
      {builtin_legendre("upsilon1"), -2.0, 2.0, true},
      {builtin_legendre("upsilon2"), 0.3, 4.0, true},
      {testing::generic_n3_curve(), -2.5, 2.5, false},
  };
  for (const auto& [c, lo, hi, legendre] : cases) {
    for (double s : numeric::uniform_grid(lo, hi, 401)) {
      const auto gk = general_kappa_tau(n3, c, s);
      const auto f = frenet_direct(n3, c, s);
      worst = std::max({worst, std::abs(f.kappa - gk.kappa), std::abs(f.tau - gk.tau)});
      if (legendre) {
        const auto lk = legendre_kappa_tau(n3, c, s);
        worst = std::max({worst, std::abs(lk.kappa - gk.kappa), std::abs(lk.tau - gk.tau), std::abs(lk.kappa - f.kappa),
                          std::abs(lk.tau - f.tau)});
      }
      ++samples;
    }
  }
  o.require(worst < 1e-5, "disagreement");
  o.detail = fmt("%.0f samples, max disagreement %.2e", samples, worst);
  return o;
}

Outcome reeb_identity() {
  Outcome o;
  double identity = 0.0, e_max = 0.0;
  int id_used = 0, e_used = 0, skipped = 0;
  // Samples outside a hypothesis (not unit speed, geodesic, δ ≈ 0, timelike normal) are skipped.
  auto sweep = [&](const StructureTensors& m, const Curve& c, double lo, double hi) {
    for (double s : numeric::uniform_grid(lo, hi, 101)) {
      try {
        identity = std::max(identity, reeb_decomposition_general(m, c, s).identity_residual);
        ++id_used;
      } catch (const HypothesisError&) {
        ++skipped;
      }
      try {
        e_max = std::max(e_max, vframe_derivative_residuals(m, c, s).max());
        ++e_used;
      } catch (const HypothesisError&) {
        ++skipped;
      }
    }
  };
  const auto gen = generate_legendre_q3(AngleFunction::parse("s", 0.0), 0.1, 3.0);
  for (int eps : {1, -1}) {
    const auto n3 = builtin_manifold("n3", eps), q3 = builtin_manifold("q3", eps);
    sweep(n3, builtin_legendre("upsilon1"), -2, 2);
    sweep(n3, builtin_legendre("upsilon2"), 0.3, 4);
    sweep(n3, testing::generic_n3_curve(), -2.5, 2.5);
    sweep(q3, testing::generic_q3_curve(), -2.5, 2.5);
    sweep(q3, gen.curve, 0.1, 3.0);
  }
  o.require(id_used > 0 && e_used > 0, "no usable samples");
  o.require(identity < 1e-7, "eta(B)^2 + eps eta(N)^2 = delta^2");
  o.require(e_max < 1e-6, "frame-derivative residuals");
  o.detail = fmt("identity %.2e, frame-derivative %.2e, ", identity, e_max) + fmt("%.0f + %.0f samples, %.0f skipped", id_used, e_used, skipped);
  return o;
}

Outcome q3_generator() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto gen = generate_legendre_q3(AngleFunction::parse("s", 0.0), 0.1, 3.0);
  const auto q3 = builtin_manifold("q3", 1);
  const auto grid = numeric::uniform_grid(0.1, 3.0, 401);
  const auto leg = is_legendre(q3, gen.curve, grid, 1e-8);
  const auto unit = is_unit_speed(q3, gen.curve, grid, 1e-8);
  double dk = 0.0, dt = 0.0, da = 0.0;
  for (double s : grid) {
    const auto k = kappa_tau_k2(gen, s);
    dk = std::max(dk, std::abs(k.kappa - 1.5));
    dt = std::max(dt, std::abs(k.tau - 1 / (2 * std::sin(s))));
    da = std::max(da, k.alpha_residual);
  }
  const double elapsed = seconds_since(t0);
  const double k1 = std::max({leg.max_abs_m, leg.chart_condition_1, leg.chart_condition_2, unit.max_deviation});
  o.require(k1 < 1e-8, "Legendre/unit-speed residuals");
  o.require(dk < 1e-6, "kappa = 1.5");
  o.require(dt < 1e-6, "tau = 1/(2 sin s)");
  o.require(da < 1e-8, "tau = |alpha|");
  o.require(elapsed < 2.0, "runtime");
  o.detail = fmt("curve residual %.2e, |k-1.5| %.2e, |tau-1/(2 sin s)| %.2e, ", k1, dk, dt) +
             fmt("|tau-|alpha|| %.2e, %.3f s", da, elapsed) + (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

Outcome spherical_machinery() {
  Outcome o;
  const auto gen = generate_legendre_q3(AngleFunction::parse("s", 0.0), 0.1, 3.0);
  const ScalarFn one = [](double) { return 1.0; };
  const ScalarFn along = [&](double s) {
    const double x = gen.curve.position(s).x();
    return 1 / (x * x);
  };
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coef(-2, 2);
  double worst = 0.0;
  int draws = 0;
  for (ThetaKind kind : {ThetaKind::spacelike_trig, ThetaKind::timelike_hyp}) {
    for (const auto& [alpha, lo, hi] : {std::tuple{one, 0.0, 1.0}, std::tuple{along, 0.6, 1.6}}) {
      for (int accepted = 0; accepted < 20;) {
        try {
          const auto sol = theta_solution(kind, coef(rng), coef(rng), alpha, 0.5 * (lo + hi), lo, hi);
          worst = std::max(worst, classify_spherical(sol, numeric::uniform_grid(lo, hi, 25), 1e-8).max_abs_residual);
          ++accepted;
          ++draws;
        } catch (const DomainError&) {
        } catch (const ValidationError&) {
        }
      }
    }
  }
  o.require(worst < 1e-8, "closed-form residual");

  // Radius constancy and vanishing residual, measured on the same perturbed profiles.
  const auto grid = numeric::uniform_grid(-1, 1, 41);
  const auto sol = theta_solution(ThetaKind::spacelike_trig, 1.0, 0.3, one, 0, -1.2, 1.2);
  const auto exact = classify_spherical(sol, grid, 1e-8);
  o.require(exact.verdict == SphericalVerdict::spherical && exact.radius2_variation < 1e-8, "exact profile");
  double ratio_lo = INFINITY, ratio_hi = 0.0;
  for (double delta : {1e-3, 1e-5, 1e-7}) {
    const auto base = sol.theta_fn();
    const ScalarFn theta = [&](double s) { return base(s) * (1 + delta * s * s * s); };
    const auto r = classify_spherical(theta, one, 1, grid, delta * 1e-3);
    const double ratio = r.radius2_variation / r.max_abs_residual;
    ratio_lo = std::min(ratio_lo, ratio);
    ratio_hi = std::max(ratio_hi, ratio);
    o.require(r.verdict == SphericalVerdict::not_spherical, "perturbed profile verdict");
  }
  o.require(ratio_lo >= 1e-2 && ratio_hi <= 1e2, "equivalence factor");

  double min_res = INFINITY;
  bool verdicts = true;
  for (int eps : {1, -1}) {
    const auto r = classify_spherical(builtin_manifold("q3", eps), gen.curve, numeric::uniform_grid(0.1, 3.0, 101), 1e-8);
    verdicts = verdicts && r.verdict == SphericalVerdict::not_spherical;
    min_res = std::min(min_res, r.min_abs_residual);
  }
  o.require(verdicts, "generated curve verdict");
  o.require(min_res > 1e-2, "residual lower bound");
  o.detail = fmt("%.0f draws max residual %.2e, radius/residual ratio in [%.2f, ", draws, worst, ratio_lo) +
             fmt("%.2f], generated curve not_spherical with min |residual| %.3f", ratio_hi, min_res) +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

Outcome null_frame() {
  Outcome o;
  const auto q3 = builtin_manifold("q3", -1);
  const auto c = testing::null_q3_curve();
  double pairings = 0.0, recon = 0.0;
  for (double s : numeric::uniform_grid(-0.4, 0.4, 41)) {
    const auto f = build_null_frame(q3, c, s);
    const auto r = null_frame_residuals(q3, c, f);
    pairings = std::max(pairings, r.pairings);
    recon = std::max({recon, r.tangent, r.screen, r.transversal});
  }
  const Vec3 t0 = c.jet(0.0).d1;
  o.require((t0 - Vec3(1, 0, 1)).norm() < 1e-14, "initial direction");
  const auto geo = geodesic_curve(q3, Point(1, 0, 0), Vec3(1, 0, 1), 0.0, -0.4, 0.4);
  const auto g = null_legendre_geodesic_check(q3, geo, numeric::uniform_grid(-0.3, 0.3, 31), 1e-8);
  o.require(pairings < 1e-8, "pairings");
  o.require(recon < 1e-6, "reconstruction");
  o.require(g.max_abs_b3 < 1e-8, "geodesic b3");
  o.detail = fmt("pairings %.2e, reconstruction %.2e, geodesic |b3| %.2e", pairings, recon, g.max_abs_b3);
  return o;
}

Outcome parser() {
  Outcome o;
  testing::RandomExpression gen(424242);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> point(-1.0, 1.0);
  auto at = [](const expr::Expr& e, double s) { return e.eval(expr::Bindings::at_parameter(s)); };
  double worst_d = 0.0, worst_rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto e = expr::parse(gen.next());
    const auto d = expr::differentiate(e, expr::Var::s);
    const auto back = expr::parse(e.str());
    const double s = point(rng), h = 2e-4;
    const double fd = (at(e, s - 2 * h) - 8 * at(e, s - h) + 8 * at(e, s + h) - at(e, s + 2 * h)) / (12 * h);
    const double exact = at(d, s);
    worst_d = std::max(worst_d, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
    worst_rt = std::max(worst_rt, std::abs(at(back, s) - at(e, s)));
  }
  o.require(worst_d < 1e-7, "derivative");
  o.require(worst_rt < 1e-12, "round trip");
  o.detail = fmt("1000 expressions, derivative rel. error %.2e, round-trip %.2e", worst_d, worst_rt);
  return o;
}

Outcome determinism() {
  Outcome o;
  cli::RunConfig verify;
  verify.manifold = "q3";
  verify.epsilon = -1;
  verify.seed = 7;
  cli::RunConfig plot;
  plot.curve = cli::CurveSource::from_flag("upsilon2");
  plot.from = 0.25;
  plot.to = 4;
  plot.n = 200;
  const auto v1 = cli::run(cli::Command::verify_manifold, verify), v2 = cli::run(cli::Command::verify_manifold, verify);
  const auto p1 = cli::run(cli::Command::plot, plot), p2 = cli::run(cli::Command::plot, plot);
  o.require(v1.exit_code == 0 && !v1.primary.empty() && v1.primary == v2.primary, "verify-manifold JSON");
  o.require(p1.exit_code == 0 && !p1.primary.empty() && p1.primary == p2.primary, "plot SVG");
  o.detail = fmt("JSON %.0f bytes, SVG %.0f bytes identical across runs", v1.primary.size(), p1.primary.size()) +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"structure verification", structure_verification},
      {"alpha/beta extraction", alpha_beta_extraction},
      {"example curves", example_curves},
      {"three-way kappa/tau oracle", three_way_oracle},
      {"Reeb decomposition identity", reeb_identity},
      {"Q3 generator", q3_generator},
      {"spherical machinery", spherical_machinery},
      {"null frame", null_frame},
      {"parser", parser},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
