#include "acpm/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "acpm/errors.hpp"
#include "acpm/expr.hpp"

namespace acpm {

namespace {

void require_epsilon(int epsilon) {
  if (epsilon != 1 && epsilon != -1) throw ValidationError("epsilon must be +1 or -1");
}

Vec3 col(double a, double b, double c) { return {a, b, c}; }

StructureTensors make_n3(int eps) {
  StructureTensors m;
  m.name = "n3";
  m.kind = BuiltinKind::n3;
  m.epsilon = eps;
  m.probe_box = ProbeBox{{-2, -2, -1}, {2, 2, 1}};
  m.eta = [](const Point& p) { return col(2 * p.y(), 0, 1); };
  m.xi = [](const Point&) { return col(0, 0, 1); };
  m.phi = [](const Point& p) {
    Mat3 f = Mat3::Zero();
    f.col(0) = col(0, 1, 0);          // φ∂₁ = ∂₂
    f.col(1) = col(-1, 0, 2 * p.y()); // φ∂₂ = 2y∂₃ − ∂₁
    return f;
  };
  m.metric = [eps](const Point& p) {
    const Vec3 eta = col(2 * p.y(), 0, 1);
    const double e2z = std::exp(2 * p.z());
    Mat3 g = eps * eta * eta.transpose();
    g(0, 0) += e2z;
    g(1, 1) += e2z;
    return g;
  };
  m.chart_domain = [](const Point&) { return true; };
  m.christoffel_table = [eps](const Point& p) {
    const double y = p.y();
    const double em2z = std::exp(-2 * p.z());
    const double e2z = std::exp(2 * p.z());
    Christoffel c;
    auto set = [&c](int i, int j, const Vec3& v) {
      for (int k = 0; k < 3; ++k) c(k, i, j) = c(k, j, i) = v[k];
    };
    set(0, 0, col(2 * y, -4 * eps * y * em2z, -eps * (4 * eps * y * y + e2z)));
    set(0, 1, col(2 * eps * y * em2z, 0, (-4 * eps * y * y + e2z) * em2z));
    set(0, 2, col(1, -eps * em2z, -2 * y));
    set(1, 1, col(2 * y, 0, -eps * (4 * eps * y * y + e2z)));
    set(1, 2, col(eps * em2z, 1, -2 * eps * y * em2z));
    set(2, 2, col(0, 0, 0));
    return c;
  };
  m.phi_partials = [](const Point&) {
    std::array<Mat3, 3> d{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    d[1](2, 1) = 2;
    return d;
  };
  m.xi_jacobian = [](const Point&) { return Mat3::Zero().eval(); };
  m.eta_jacobian = [](const Point&) {
    Mat3 j = Mat3::Zero();
    j(0, 1) = 2;
    return j;
  };
  return m;
}

StructureTensors make_q3(int eps) {
  StructureTensors m;
  m.name = "q3";
  m.kind = BuiltinKind::q3;
  m.epsilon = eps;
  m.probe_box = ProbeBox{{0.25, -2, -2}, {3, 2, 2}};
  m.eta = [](const Point& p) { return col(0, -2 * p.x(), 1); };
  m.xi = [](const Point&) { return col(0, 0, 1); };
  m.phi = [](const Point& p) {
    Mat3 f = Mat3::Zero();
    f.col(0) = col(0, 1, 2 * p.x());  // φ∂₁ = ∂₂ + 2x∂₃
    f.col(1) = col(-1, 0, 0);         // φ∂₂ = −∂₁
    return f;
  };
  m.metric = [eps](const Point& p) {
    const Vec3 eta = col(0, -2 * p.x(), 1);
    const double x2 = p.x() * p.x();
    Mat3 g = eps * eta * eta.transpose();
    g(0, 0) += x2;
    g(1, 1) += x2;
    return g;
  };
  m.chart_domain = [](const Point& p) { return p.x() > 0; };
  m.christoffel_table = [eps](const Point& p) {
    const double x = p.x();
    Christoffel c;
    auto set = [&c](int i, int j, const Vec3& v) {
      for (int k = 0; k < 3; ++k) c(k, i, j) = c(k, j, i) = v[k];
    };
    set(0, 0, col(1 / x, 0, 0));
    set(1, 1, col(-(1 + 4 * eps) / x, 0, 0));
    set(2, 2, col(0, 0, 0));
    set(1, 2, col(eps / (x * x), 0, 0));
    set(0, 1, col(0, (2 * eps + 1) / x, 1 + 4 * eps));
    set(0, 2, col(0, -eps / (x * x), -2 * eps / x));
    return c;
  };
  m.phi_partials = [](const Point&) {
    std::array<Mat3, 3> d{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    d[0](2, 0) = 2;
    return d;
  };
  m.xi_jacobian = [](const Point&) { return Mat3::Zero().eval(); };
  m.eta_jacobian = [](const Point&) {
    Mat3 j = Mat3::Zero();
    j(1, 0) = -2;
    return j;
  };
  return m;
}

double max_abs(const Mat3& a) { return a.cwiseAbs().maxCoeff(); }

void require_probes(const StructureTensors& m, const std::vector<Point>& probes) {
  for (const auto& p : probes) require_in_domain(m, p);
}

}  // namespace

void require_in_domain(const StructureTensors& m, const Point& p) {
  if (!p.coords.allFinite() || !m.contains(p)) {
    throw DomainError("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ", " +
                      std::to_string(p.z()) + ") lies outside the chart domain of '" + m.name + "'");
  }
}

StructureTensors builtin_manifold(const std::string& name, int epsilon) {
  require_epsilon(epsilon);
  if (name == "n3") return make_n3(epsilon);
  if (name == "q3") return make_q3(epsilon);
  throw ValidationError("unknown manifold '" + name + "' (expected n3 or q3)");
}

StructureTensors user_manifold(const UserStructureSpec& spec) {
  require_epsilon(spec.epsilon);
  using expr::Expr;
  using expr::Var;
  static constexpr Var coords[3] = {Var::x, Var::y, Var::z};

  std::array<Expr, 9> g, f;
  std::array<Expr, 3> xi, eta;
  for (int i = 0; i < 9; ++i) {
    g[i] = expr::parse(spec.metric[i]);
    f[i] = expr::parse(spec.phi[i]);
  }
  for (int i = 0; i < 3; ++i) {
    xi[i] = expr::parse(spec.xi[i]);
    eta[i] = expr::parse(spec.eta[i]);
  }
  std::optional<Expr> domain;
  if (!spec.domain.empty()) domain = expr::parse(spec.domain);

  auto mat = [](const std::array<Expr, 9>& e, const Point& p) {
    const auto b = expr::Bindings::at_point(p);
    Mat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out(i, j) = e[3 * i + j].eval(b);
    return out;
  };
  auto vec = [](const std::array<Expr, 3>& e, const Point& p) {
    const auto b = expr::Bindings::at_point(p);
    return Vec3(e[0].eval(b), e[1].eval(b), e[2].eval(b));
  };
  auto dmat = [](const std::array<Expr, 9>& e) {
    std::array<std::array<Expr, 9>, 3> d;
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 9; ++i) d[l][i] = expr::differentiate(e[i], coords[l]);
    return d;
  };
  auto dvec = [](const std::array<Expr, 3>& e) {
    std::array<Expr, 9> d;  // row-major J(k, l) = ∂ₗ eₖ
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) d[3 * k + l] = expr::differentiate(e[k], coords[l]);
    return d;
  };

  StructureTensors m;
  m.name = spec.name;
  m.kind = BuiltinKind::none;
  m.epsilon = spec.epsilon;
  m.probe_box = spec.probe_box;
  m.metric = [g, mat](const Point& p) { return mat(g, p); };
  m.phi = [f, mat](const Point& p) { return mat(f, p); };
  m.xi = [xi, vec](const Point& p) { return vec(xi, p); };
  m.eta = [eta, vec](const Point& p) { return vec(eta, p); };
  m.chart_domain = [domain](const Point& p) {
    if (!domain) return true;
    try {
      return domain->eval(expr::Bindings::at_point(p)) > 0.0;
    } catch (const DomainError&) {
      return false;
    }
  };
  const auto dg = dmat(g);
  const auto df = dmat(f);
  m.metric_partials = [dg, mat](const Point& p) {
    return std::array<Mat3, 3>{mat(dg[0], p), mat(dg[1], p), mat(dg[2], p)};
  };
  m.phi_partials = [df, mat](const Point& p) {
    return std::array<Mat3, 3>{mat(df[0], p), mat(df[1], p), mat(df[2], p)};
  };
  const auto dxi = dvec(xi);
  const auto deta = dvec(eta);
  m.xi_jacobian = [dxi, mat](const Point& p) { return mat(dxi, p); };
  m.eta_jacobian = [deta, mat](const Point& p) { return mat(deta, p); };

  // Symmetry is checked numerically on probe points: the strings may differ textually.
  for (const auto& p : probe_points(m, 20, 1)) {
    const Mat3 gp = m.metric(p);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const double scale = std::max({1.0, std::abs(gp(i, j)), std::abs(gp(j, i))});
        if (std::abs(gp(i, j) - gp(j, i)) > 1e-12 * scale)
          throw ValidationError("metric is not symmetric: g_" + std::to_string(i + 1) + std::to_string(j + 1) +
                                " != g_" + std::to_string(j + 1) + std::to_string(i + 1));
      }
    if (std::abs(gp.determinant()) < 1e-14) throw ValidationError("metric is degenerate on the probe box");
  }
  return m;
}

std::vector<Point> probe_points(const StructureTensors& m, int count, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(count);
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 1000 * std::max(count, 1)) throw DomainError("probe box does not meet the chart domain");
    Vec3 c;
    for (int i = 0; i < 3; ++i) c[i] = m.probe_box.lo[i] + (m.probe_box.hi[i] - m.probe_box.lo[i]) * unit(rng);
    Point p(c);
    if (m.contains(p)) out.push_back(p);
  }
  return out;
}

const char* to_string(CausalCharacter c) {
  switch (c) {
    case CausalCharacter::spacelike: return "spacelike";
    case CausalCharacter::timelike: return "timelike";
    case CausalCharacter::null: return "null";
  }
  return "?";
}

bool StructureReport::pass() const {
  return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResidual& a) { return a.pass; });
}

double StructureReport::residual(const std::string& name) const {
  for (const auto& a : axioms)
    if (a.name == name) return a.residual;
  throw ValidationError("no axiom named '" + name + "' in report");
}

StructureReport check_almost_contact(const StructureTensors& m, const std::vector<Point>& probes, double tol) {
  require_probes(m, probes);
  double phi2 = 0, eta_xi = 0, phi_xi = 0, eta_phi = 0;
  for (const auto& p : probes) {
    const Mat3 f = m.phi(p);
    const Vec3 xi = m.xi(p);
    const Vec3 eta = m.eta(p);
    phi2 = std::max(phi2, max_abs(f * f + Mat3::Identity() - xi * eta.transpose()));
    eta_xi = std::max(eta_xi, std::abs(eta.dot(xi) - 1.0));
    phi_xi = std::max(phi_xi, (f * xi).cwiseAbs().maxCoeff());
    eta_phi = std::max(eta_phi, (eta.transpose() * f).cwiseAbs().maxCoeff());
  }
  StructureReport r;
  r.tol = tol;
  for (auto [name, value] : {std::pair{"phi_squared", phi2}, std::pair{"eta_xi", eta_xi},
                             std::pair{"phi_xi", phi_xi}, std::pair{"eta_phi", eta_phi}})
    r.axioms.push_back({name, value, value < tol});
  return r;
}

StructureReport check_compatibility(const StructureTensors& m, const std::vector<Point>& probes, double tol) {
  require_probes(m, probes);
  const double eps = m.epsilon;
  double compat = 0, dual = 0, norm = 0;
  for (const auto& p : probes) {
    const Mat3 g = m.metric(p);
    const Mat3 f = m.phi(p);
    const Vec3 xi = m.xi(p);
    const Vec3 eta = m.eta(p);
    compat = std::max(compat, max_abs(f.transpose() * g * f - g + eps * eta * eta.transpose()));
    dual = std::max(dual, (eta - eps * g * xi).cwiseAbs().maxCoeff());
    norm = std::max(norm, std::abs(xi.dot(g * xi) - eps));
  }
  StructureReport r;
  r.tol = tol;
  for (auto [name, value] :
       {std::pair{"phi_compatibility", compat}, std::pair{"eta_metric_dual", dual}, std::pair{"xi_norm", norm}})
    r.axioms.push_back({name, value, value < tol});
  return r;
}

double fundamental_two_form(const StructureTensors& m, const Point& p, const TangentVector& x,
                            const TangentVector& y) {
  if (x.base.coords != p.coords || y.base.coords != p.coords)
    throw ValidationError("tangent vectors are not based at the evaluation point");
  require_in_domain(m, p);
  return m.epsilon * m.g(p, x.components, m.phi(p) * y.components);
}

CausalCharacter causal_character(const StructureTensors& m, const Point& p, const Vec3& x, double tol) {
  const double n2 = x.squaredNorm();
  if (n2 == 0.0) throw ValidationError("causal character of the zero vector is undefined");
  require_in_domain(m, p);
  const double q = m.g(p, x, x);
  if (std::abs(q) <= tol * n2) return CausalCharacter::null;
  return q > 0 ? CausalCharacter::spacelike : CausalCharacter::timelike;
}

double phi_rank_determinant(const StructureTensors& m, const Point& p) {
  require_in_domain(m, p);
  const Vec3 eta = m.eta(p);
  // Two independent vectors of ker η from the best-conditioned cross products.
  std::array<Vec3, 3> candidates{eta.cross(Vec3::UnitX()), eta.cross(Vec3::UnitY()), eta.cross(Vec3::UnitZ())};
  std::sort(candidates.begin(), candidates.end(),
            [](const Vec3& a, const Vec3& b) { return a.squaredNorm() > b.squaredNorm(); });
  Eigen::Matrix<double, 3, 2> basis;
  basis.col(0) = candidates[0].normalized();
  basis.col(1) = (candidates[1] - candidates[1].dot(basis.col(0)) * basis.col(0)).normalized();
  const Eigen::Matrix<double, 3, 2> image = m.phi(p) * basis;
  const Eigen::Matrix2d restricted = basis.colPivHouseholderQr().solve(image);
  return restricted.determinant();
}

std::array<int, 3> metric_signature(const StructureTensors& m, const Point& p) {
  require_in_domain(m, p);
  Eigen::SelfAdjointEigenSolver<Mat3> solver(m.metric(p), Eigen::EigenvaluesOnly);
  const Vec3 ev = solver.eigenvalues();
  std::array<int, 3> signs{};
  for (int i = 0; i < 3; ++i) signs[i] = ev[i] > 0 ? 1 : (ev[i] < 0 ? -1 : 0);
  return signs;
}

}  // namespace acpm
