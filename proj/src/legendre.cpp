#include "acpm/legendre.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "acpm/connection.hpp"
#include "acpm/errors.hpp"
#include "acpm/numeric.hpp"

namespace acpm {

namespace {

/// Value and first three derivatives of a scalar function at one point.
struct Jet {
  double d[4] = {0, 0, 0, 0};
};

Jet operator*(const Jet& f, const Jet& g) {
  Jet h;
  h.d[0] = f.d[0] * g.d[0];
  h.d[1] = f.d[1] * g.d[0] + f.d[0] * g.d[1];
  h.d[2] = f.d[2] * g.d[0] + 2 * f.d[1] * g.d[1] + f.d[0] * g.d[2];
  h.d[3] = f.d[3] * g.d[0] + 3 * f.d[2] * g.d[1] + 3 * f.d[1] * g.d[2] + f.d[0] * g.d[3];
  return h;
}

Jet scale(const Jet& f, double c) {
  Jet h;
  for (int i = 0; i < 4; ++i) h.d[i] = c * f.d[i];
  return h;
}

/// F∘f from F and its first three derivatives at f(s).
Jet compose(double F0, double F1, double F2, double F3, const Jet& f) {
  const double a = f.d[1], b = f.d[2], c = f.d[3];
  Jet h;
  h.d[0] = F0;
  h.d[1] = F1 * a;
  h.d[2] = F2 * a * a + F1 * b;
  h.d[3] = F3 * a * a * a + 3 * F2 * a * b + F1 * c;
  return h;
}

Jet jet_sin(const Jet& f) {
  const double s = std::sin(f.d[0]), c = std::cos(f.d[0]);
  return compose(s, c, -s, -c, f);
}

Jet jet_cos(const Jet& f) {
  const double s = std::sin(f.d[0]), c = std::cos(f.d[0]);
  return compose(c, -s, -c, s, f);
}

Jet jet_sqrt(const Jet& f) {
  const double r = std::sqrt(f.d[0]);
  return compose(r, 0.5 / r, -0.25 / (r * f.d[0]), 0.375 / (r * f.d[0] * f.d[0]), f);
}

Jet jet_reciprocal(const Jet& f) {
  const double x = f.d[0];
  return compose(1 / x, -1 / (x * x), 2 / (x * x * x), -6 / (x * x * x * x), f);
}

/// Antiderivative jet: value from a table, derivatives from the integrand's jet.
Jet integral(double value, const Jet& integrand) {
  Jet h;
  h.d[0] = value;
  h.d[1] = integrand.d[0];
  h.d[2] = integrand.d[1];
  h.d[3] = integrand.d[2];
  return h;
}

}  // namespace

struct GeneratorTables {
  std::array<expr::Expr, 4> psi;  // ψ and its first three derivatives
  numeric::CumulativeIntegral mu2;
  numeric::CumulativeIntegral y;
  numeric::CumulativeIntegral z;
  double s0 = 0.0;

  Jet psi_jet(double s) const {
    const auto b = expr::Bindings::at_parameter(s);
    Jet j;
    for (int i = 0; i < 4; ++i) j.d[i] = psi[i].eval(b);
    return j;
  }
  double mu2_at(double s) const { return mu2.between(s0, s); }
};

AngleFunction AngleFunction::parse(const std::string& text, double s0) {
  AngleFunction a{expr::parse(text), s0};
  for (expr::Var v : {expr::Var::x, expr::Var::y, expr::Var::z})
    if (a.psi.depends_on(v)) throw ValidationError("angle function '" + text + "' may only depend on s");
  return a;
}

Curve builtin_legendre(const std::string& name) {
  if (name == "upsilon1")
    return expression_curve(name, {"1", "s", "0"}, -std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity());
  if (name == "upsilon2") return expression_curve(name, {"-ln(s)", "0.5", "ln(s)"}, 0.0,
                                                  std::numeric_limits<double>::infinity());
  throw ValidationError("unknown built-in curve '" + name + "' (expected upsilon1 or upsilon2)");
}

double GeneratedLegendre::mu2(double s) const { return tables->mu2_at(s); }

GeneratedLegendre generate_legendre_q3(const AngleFunction& psi, double lo, double hi, int cells) {
  if (!(hi > lo)) throw ValidationError("generator interval must satisfy from < to");
  if (cells < 16) throw ValidationError("generator needs at least 16 quadrature cells");
  auto t = std::make_shared<GeneratorTables>();
  t->psi[0] = psi.psi;
  for (int i = 1; i < 4; ++i) t->psi[i] = expr::differentiate(t->psi[i - 1], expr::Var::s);
  t->s0 = psi.s0;
  const expr::Expr psi0 = psi.psi;
  auto at = [psi0](double s) { return psi0.eval(expr::Bindings::at_parameter(s)); };

  const double a = std::min(lo, psi.s0), b = std::max(hi, psi.s0);
  const int mu_cells = static_cast<int>(std::ceil(cells * (b - a) / (hi - lo)));
  t->mu2 = numeric::CumulativeIntegral([at](double s) { return 2.0 * std::cos(at(s)); }, a, b, mu_cells);

  for (int i = 0; i <= cells; ++i) {
    const double s = lo + (hi - lo) * i / cells;
    if (t->mu2_at(s) <= 0.0) {
      std::ostringstream os;
      os << "mu^2 = 2 * integral of cos(psi) is not positive at s = " << s << " (value " << t->mu2_at(s)
         << "); the curve would leave the chart x > 0";
      throw DomainError(os.str());
    }
  }
  const GeneratorTables* raw = t.get();
  t->y = numeric::CumulativeIntegral([raw, at](double s) { return std::sin(at(s)) / std::sqrt(raw->mu2_at(s)); },
                                     lo, hi, cells);
  t->z = numeric::CumulativeIntegral([at](double s) { return 2.0 * std::sin(at(s)); }, lo, hi, cells);

  GeneratedLegendre g;
  g.psi = psi;
  g.lo = lo;
  g.hi = hi;
  g.tables = t;
  g.curve = Curve("k2(" + psi.psi.str() + ")", lo, hi, [t](double s) {
    const Jet p = t->psi_jet(s);
    const Jet c = jet_cos(p), sn = jet_sin(p);
    Jet m2 = integral(t->mu2_at(s), scale(c, 2.0));
    const Jet mu = jet_sqrt(m2);
    const Jet y = integral(t->y(s), sn * jet_reciprocal(mu));
    const Jet z = integral(t->z(s), scale(sn, 2.0));
    CurveJet j;
    j.position = Vec3(mu.d[0], y.d[0], z.d[0]);
    j.d1 = Vec3(mu.d[1], y.d[1], z.d[1]);
    j.d2 = Vec3(mu.d[2], y.d[2], z.d[2]);
    j.d3 = Vec3(mu.d[3], y.d[3], z.d[3]);
    return j;
  });
  return g;
}

namespace {

KappaTauK2 k2_from(const AngleFunction& psi, double s, double mu2) {
  if (!(mu2 > 0.0)) {
    std::ostringstream os;
    os << "mu^2 is not positive at s = " << s;
    throw DomainError(os.str());
  }
  const auto b = expr::Bindings::at_parameter(s);
  const double angle = psi.psi.eval(b);
  const double rate = expr::differentiate(psi.psi, expr::Var::s).eval(b);
  KappaTauK2 r;
  r.mu2 = mu2;
  r.kappa_signed = rate + std::sin(angle) / mu2;
  r.kappa = std::abs(r.kappa_signed);
  r.tau = 1.0 / mu2;
  r.alpha_residual = std::numeric_limits<double>::quiet_NaN();
  if (r.kappa < 1e-7) {
    std::ostringstream os;
    os << "geodesic point at s = " << s << " (psi' + sin(psi)/mu^2 = " << r.kappa_signed << ")";
    throw GeodesicError(os.str());
  }
  return r;
}

}  // namespace

KappaTauK2 kappa_tau_k2(const AngleFunction& psi, double s) {
  const expr::Expr e = psi.psi;
  auto integrand = [e](double t) { return 2.0 * std::cos(e.eval(expr::Bindings::at_parameter(t))); };
  const double mu2 = s == psi.s0 ? 0.0 : numeric::simpson_converged(integrand, psi.s0, s, 1e-14).value;
  return k2_from(psi, s, mu2);
}

KappaTauK2 kappa_tau_k2(const GeneratedLegendre& gen, double s) {
  KappaTauK2 r = k2_from(gen.psi, s, gen.mu2(s));
  static const StructureTensors q3 = builtin_manifold("q3", 1);
  r.alpha_residual = std::abs(r.tau - std::abs(alpha_beta(q3, gen.curve.position(s)).alpha));
  return r;
}

}  // namespace acpm
