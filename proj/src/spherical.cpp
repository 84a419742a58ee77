#include "acpm/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "acpm/connection.hpp"
#include "acpm/errors.hpp"

namespace acpm {

namespace {

/// Throws DomainError when f vanishes or changes sign on the stencil s ± 2h.
void require_nonvanishing(const ScalarFn& f, double s, double h, const char* name) {
  double first = 0.0;
  for (int k = -4; k <= 4; ++k) {
    const double v = f(s + 0.5 * k * h);
    if (!std::isfinite(v) || v == 0.0 || (k > -4 && (v > 0) != (first > 0))) {
      std::ostringstream os;
      os << name << " vanishes near s = " << s;
      throw DomainError(os.str());
    }
    if (k == -4) first = v;
  }
}

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

struct LegendrePoint {
  Vec3 T, accel, N, xi;
  Point p;
  double theta = 0.0;
  double alpha = 0.0;
};

LegendrePoint legendre_point(const StructureTensors& m, const ConnectionField& conn, const Curve& curve, double s,
                             const FrenetOptions& opt, bool validate) {
  const auto smp = sample(m, curve, s);
  LegendrePoint lp;
  lp.p = smp.position;
  lp.T = smp.velocity;
  lp.accel = smp.acceleration + conn.at(lp.p).contract(lp.T, lp.T);
  lp.N = m.phi(lp.p) * lp.T;
  lp.xi = m.xi(lp.p);
  const Mat3 g = m.metric(lp.p);
  lp.theta = lp.accel.dot(g * lp.N);
  const auto ab = alpha_beta(m, conn, lp.p);
  lp.alpha = ab.alpha;
  if (!validate) return lp;
  std::ostringstream os;
  if (std::abs(smp.m) > opt.legendre_tol) {
    os << "curve is not Legendre at s = " << s << " (eta(v) = " << smp.m << ")";
    throw NotLegendreError(os.str());
  }
  if (std::abs(smp.speed2 - 1.0) > opt.unit_speed_tol) {
    os << "curve is not unit speed at s = " << s << " (g(v, v) = " << smp.speed2 << ")";
    throw HypothesisError(os.str());
  }
  if (std::abs(ab.beta) > 1e-8) {
    os << "structure is not quasi-Sasakian at s = " << s << " (beta = " << ab.beta << ")";
    throw HypothesisError(os.str());
  }
  if (std::abs(ab.alpha) < 1e-12) {
    os << "alpha vanishes at s = " << s;
    throw DomainError(os.str());
  }
  if (std::abs(lp.theta) < opt.kappa_min) {
    os << "geodesic point at s = " << s << " (theta = " << lp.theta << ")";
    throw GeodesicError(os.str());
  }
  return lp;
}

double radius2_of(double theta, double theta_prime, double alpha, int eps) {
  const double b = theta_prime / (theta * theta * std::abs(alpha));
  return 1.0 / (theta * theta) + eps * b * b;
}

}  // namespace

double euclidean_spherical_residual(const ScalarFn& kappa, const ScalarFn& tau, double s, double h) {
  require_nonvanishing(kappa, s, h, "curvature");
  require_nonvanishing(tau, s, h, "torsion");
  auto inv_kappa = [&](double t) { return 1.0 / kappa(t); };
  auto inner = [&](double t) { return numeric::richardson(inv_kappa, t, h) / tau(t); };
  return tau(s) / kappa(s) + numeric::richardson(inner, s, h);
}

double euclidean_spherical_residual(const expr::Expr& kappa, const expr::Expr& tau, double s) {
  const auto b = expr::Bindings::at_parameter(s);
  const double k = kappa.eval(b), t = tau.eval(b);
  if (k == 0.0 || t == 0.0) {
    std::ostringstream os;
    os << "curvature or torsion vanishes at s = " << s;
    throw DomainError(os.str());
  }
  using expr::Var;
  const expr::Expr one = expr::Expr::constant(1.0);
  const expr::Expr inner = expr::differentiate(one / kappa, Var::s) / tau;
  return (tau / kappa + expr::differentiate(inner, Var::s)).eval(b);
}

OsculatingData osculating_sphere(const StructureTensors& m, const Curve& curve, double s, const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const auto lp = legendre_point(m, conn, curve, s, opt, true);
  const double theta_prime =
      curve.differentiate([&](double t) { return legendre_point(m, conn, curve, t, opt, false).theta; }, s);
  OsculatingData o;
  o.s = s;
  o.theta = lp.theta;
  o.theta_prime = theta_prime;
  o.alpha = lp.alpha;
  o.center_offset_N = 1.0 / lp.theta;
  o.center_offset_B = -theta_prime / (lp.theta * lp.theta * std::abs(lp.alpha));
  o.radius2_signed = radius2_of(lp.theta, theta_prime, lp.alpha, m.epsilon);
  o.N = lp.N;
  o.B = m.epsilon * sgn(lp.alpha) * lp.xi;
  o.center_chart = Point(lp.p.coords + o.center_offset_N * o.N + o.center_offset_B * o.B);
  return o;
}

namespace {

using Differentiator = std::function<double(const ScalarFn&, double)>;

Differentiator richardson_with(double h) {
  return [h](const ScalarFn& f, double s) { return numeric::richardson(f, s, h); };
}

/// ((1/θ)′/|α|)′ + ε|α|/θ, evaluated through u = 1/θ, which stays bounded where θ is large.
double rewritten_form(const ScalarFn& theta, const ScalarFn& alpha, int epsilon, double s, const Differentiator& d) {
  const ScalarFn u = [&](double t) { return 1.0 / theta(t); };
  const ScalarFn inner = [&](double t) { return d(u, t) / std::abs(alpha(t)); };
  return d(inner, s) + epsilon * std::abs(alpha(s)) * u(s);
}

/// (θ′/(θ²|α|))′ − ε|α|/θ with θ′ supplied.
double residual_with_slope(const ScalarFn& theta, const ScalarFn& theta_prime, const ScalarFn& alpha, int epsilon,
                           double s, const Differentiator& d) {
  const ScalarFn inner = [&](double t) {
    const double th = theta(t);
    return theta_prime(t) / (th * th * std::abs(alpha(t)));
  };
  return d(inner, s) - epsilon * std::abs(alpha(s)) / theta(s);
}

}  // namespace

double spherical_residual_q3(const ScalarFn& theta, const ScalarFn& alpha, int epsilon, double s, double h) {
  require_nonvanishing(theta, s, h, "theta");
  require_nonvanishing(alpha, s, h, "alpha");
  return -rewritten_form(theta, alpha, epsilon, s, richardson_with(h));
}

double spherical_residual_q3(const ScalarFn& theta, const ScalarFn& theta_prime, const ScalarFn& alpha, int epsilon,
                             double s, double h) {
  require_nonvanishing(theta, s, 0.5 * h, "theta");
  require_nonvanishing(alpha, s, 0.5 * h, "alpha");
  return residual_with_slope(theta, theta_prime, alpha, epsilon, s, richardson_with(h));
}

double spherical_residual_q3_rewritten(const ScalarFn& theta, const ScalarFn& alpha, int epsilon, double s,
                                       double h) {
  require_nonvanishing(theta, s, h, "theta");
  require_nonvanishing(alpha, s, h, "alpha");
  return rewritten_form(theta, alpha, epsilon, s, richardson_with(h));
}

ThetaKind theta_kind_from_string(const std::string& name) {
  if (name == "spacelike_trig") return ThetaKind::spacelike_trig;
  if (name == "timelike_hyp") return ThetaKind::timelike_hyp;
  throw ValidationError("unknown solution kind '" + name + "' (expected spacelike_trig or timelike_hyp)");
}

std::string to_string(ThetaKind kind) {
  return kind == ThetaKind::spacelike_trig ? "spacelike_trig" : "timelike_hyp";
}

double ThetaSolution::integral(double s) const { return table_->between(s0_, s); }

double ThetaSolution::inverse_theta(double s) const {
  const double a = integral(s);
  if (kind_ == ThetaKind::spacelike_trig) return c1_ * std::cos(a) + c2_ * std::sin(a);
  return c1_ * std::cosh(a) + c2_ * std::sinh(a);
}

double ThetaSolution::theta_prime(double s) const {
  const double a = integral(s);
  const double rate = std::abs(alpha_(s));
  const double d_inv = kind_ == ThetaKind::spacelike_trig ? rate * (-c1_ * std::sin(a) + c2_ * std::cos(a))
                                                          : rate * (c1_ * std::sinh(a) + c2_ * std::cosh(a));
  const double th = theta(s);
  return -th * th * d_inv;
}

ScalarFn ThetaSolution::theta_fn() const {
  auto self = std::make_shared<ThetaSolution>(*this);
  return [self](double s) { return self->theta(s); };
}

ThetaSolution theta_solution(ThetaKind kind, double c1, double c2, const ScalarFn& alpha, double s0, double lo,
                             double hi) {
  if (!(hi > lo)) throw ValidationError("theta_solution: interval must satisfy lo < hi");
  if (c1 == 0.0 && c2 == 0.0) throw ValidationError("theta_solution: coefficients are both zero");
  if (kind == ThetaKind::timelike_hyp && std::abs(std::abs(c1) - std::abs(c2)) <= 1e-12 * std::abs(c1)) {
    std::ostringstream os;
    os << "timelike solution needs B1 != +-B2 (got B1 = " << c1 << ", B2 = " << c2
       << "); that case is the excluded exponential theta";
    throw ValidationError(os.str());
  }
  const double a = std::min(lo, s0), b = std::max(hi, s0);
  auto abs_alpha = [alpha](double t) { return std::abs(alpha(t)); };

  constexpr int kScan = 4096;
  double prev = alpha(a);
  for (int i = 0; i <= kScan; ++i) {
    const double t = a + (b - a) * i / kScan;
    const double v = alpha(t);
    if (!std::isfinite(v) || v == 0.0 || (v > 0) != (prev > 0)) {
      std::ostringstream os;
      os << "theta_solution: alpha vanishes near s = " << t;
      throw DomainError(os.str());
    }
    prev = v;
  }

  const double reference = numeric::simpson_converged(abs_alpha, a, b, 1e-14).value;
  ThetaSolution sol;
  sol.kind_ = kind;
  sol.c1_ = c1;
  sol.c2_ = c2;
  sol.s0_ = s0;
  sol.lo_ = lo;
  sol.hi_ = hi;
  sol.alpha_ = alpha;
  for (int cells = 256;; cells *= 4) {
    sol.table_ = std::make_shared<numeric::CumulativeIntegral>(abs_alpha, a, b, cells);
    const double total = (*sol.table_)(b) - (*sol.table_)(a);
    if (std::abs(total - reference) <= 1e-12 * std::max(1.0, std::abs(reference)) || cells >= (1 << 20)) break;
  }

  double prev_inv = sol.inverse_theta(lo);
  for (int i = 0; i <= kScan; ++i) {
    const double t = lo + (hi - lo) * i / kScan;
    const double v = sol.inverse_theta(t);
    if (std::abs(v) < 1e-12 || (v > 0) != (prev_inv > 0)) {
      std::ostringstream os;
      os << "1/theta vanishes near s = " << t << "; the solution only exists on a restricted domain";
      throw DomainError(os.str());
    }
    prev_inv = v;
  }
  return sol;
}

std::string to_string(SphericalVerdict v) {
  switch (v) {
    case SphericalVerdict::spherical:
      return "spherical";
    case SphericalVerdict::not_spherical:
      return "not_spherical";
    case SphericalVerdict::excluded_case:
      return "excluded_case";
  }
  return "unknown";
}

namespace {

/// Shared verdict logic. `slope` gives θ′ when it is known in closed form; otherwise θ′ and the
/// residual come from the differentiator.
SphericalReport classify_profile(const ScalarFn& theta, const ScalarFn* slope, const ScalarFn& alpha, int epsilon,
                                 const std::vector<double>& grid, double tol, const Differentiator& d) {
  if (grid.empty()) throw ValidationError("classify_spherical: empty grid");
  if (epsilon != 1 && epsilon != -1) throw ValidationError("epsilon must be +1 or -1");
  SphericalReport r;
  r.epsilon = epsilon;
  r.min_abs_residual = std::numeric_limits<double>::infinity();
  double max_theta = 0.0, max_theta_prime = 0.0, max_alpha_theta = 0.0;
  double exp_defect[2] = {0.0, 0.0};
  double r2_min = std::numeric_limits<double>::infinity(), r2_max = -r2_min;
  for (double s : grid) {
    const double th = theta(s), a = std::abs(alpha(s));
    if (th == 0.0 || a == 0.0) {
      std::ostringstream os;
      os << "theta or alpha vanishes at s = " << s;
      throw DomainError(os.str());
    }
    const double res = slope ? residual_with_slope(theta, *slope, alpha, epsilon, s, d)
                             : -rewritten_form(theta, alpha, epsilon, s, d);
    const double thp = slope ? (*slope)(s) : d(theta, s);
    const double r2 = radius2_of(th, thp, a, epsilon);
    r.s.push_back(s);
    r.residual.push_back(res);
    r.radius2.push_back(r2);
    r.max_abs_residual = std::max(r.max_abs_residual, std::abs(res));
    r.min_abs_residual = std::min(r.min_abs_residual, std::abs(res));
    r2_min = std::min(r2_min, r2);
    r2_max = std::max(r2_max, r2);
    max_theta = std::max(max_theta, std::abs(th));
    max_theta_prime = std::max(max_theta_prime, std::abs(thp));
    max_alpha_theta = std::max(max_alpha_theta, a * std::abs(th));
    exp_defect[0] = std::max(exp_defect[0], std::abs(thp - a * th));
    exp_defect[1] = std::max(exp_defect[1], std::abs(thp + a * th));
  }
  r.radius2_variation = r2_max - r2_min;

  const double flag_tol = std::max(tol, 1e-9);
  r.theta_constant = max_theta_prime <= flag_tol * std::max(1.0, max_theta);
  if (epsilon == -1 && !r.theta_constant)
    r.theta_exponential = std::min(exp_defect[0], exp_defect[1]) <= flag_tol * std::max(1.0, max_alpha_theta);

  if (r.theta_constant)
    r.notes.push_back("theta is constant; the characterization assumes non-constant theta and the residual "
                      "reduces to -eps*|alpha|/theta");
  if (r.theta_exponential)
    r.notes.push_back("theta = theta(s0)*exp(+-integral |alpha|) is the excluded solution for a timelike Reeb "
                      "field");

  if (r.max_abs_residual > tol)
    r.verdict = SphericalVerdict::not_spherical;
  else if (r.theta_constant || r.theta_exponential)
    r.verdict = SphericalVerdict::excluded_case;
  else
    r.verdict = SphericalVerdict::spherical;
  return r;
}

}  // namespace

SphericalReport classify_spherical(const ScalarFn& theta, const ScalarFn& alpha, int epsilon,
                                   const std::vector<double>& grid, double tol) {
  return classify_profile(theta, nullptr, alpha, epsilon, grid, tol, richardson_with(numeric::kCurveStep));
}

SphericalReport classify_spherical(const ThetaSolution& sol, const std::vector<double>& grid, double tol) {
  const ScalarFn theta = sol.theta_fn();
  const ScalarFn slope = [&sol](double s) { return sol.theta_prime(s); };
  const ScalarFn alpha = sol.alpha_fn();
  const double lo = sol.lower(), hi = sol.upper();
  const Differentiator d = [lo, hi](const ScalarFn& f, double s) {
    return numeric::derivative_within(f, s, lo, hi, numeric::kCurveStep);
  };
  return classify_profile(theta, &slope, alpha, sol.epsilon(), grid, tol, d);
}

SphericalReport classify_spherical(const StructureTensors& m, const Curve& curve, const std::vector<double>& grid,
                                   double tol, const FrenetOptions& opt) {
  if (grid.empty()) throw ValidationError("classify_spherical: empty grid");
  const auto conn = ConnectionField::closed_form(m);
  for (double s : grid) legendre_point(m, conn, curve, s, opt, true);

  const ScalarFn theta = [&](double t) { return legendre_point(m, conn, curve, t, opt, false).theta; };
  const ScalarFn alpha = [&](double t) { return alpha_beta(m, conn, curve.position(t)).alpha; };
  const Differentiator d = [&curve](const ScalarFn& f, double s) { return curve.differentiate(f, s); };
  SphericalReport r = classify_profile(theta, nullptr, alpha, m.epsilon, grid, tol, d);

  // Centre motion: with X = c − υ along the curve, ∇c = T + ∇_T X should equal −residual·B.
  auto offset = [&](double t) {
    const auto o = osculating_sphere(m, curve, t, opt);
    return Vec3(o.center_offset_N * o.N + o.center_offset_B * o.B);
  };
  r.has_center_check = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    const auto o = osculating_sphere(m, curve, s, opt);
    const Vec3 T = curve.jet(s).d1;
    const Vec3 X = o.center_offset_N * o.N + o.center_offset_B * o.B;
    const Vec3 dc = T + curve.differentiate(offset, s) + conn.at(curve.position(s)).contract(T, X);
    r.max_center_speed = std::max(r.max_center_speed, dc.cwiseAbs().maxCoeff());
    r.center_consistency = std::max(r.center_consistency, (dc + r.residual[i] * o.B).cwiseAbs().maxCoeff());
  }
  return r;
}

}  // namespace acpm
