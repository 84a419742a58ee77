#include "acpm/frenet.hpp"

#include <cmath>
#include <sstream>

#include "acpm/errors.hpp"
#include "acpm/numeric.hpp"

namespace acpm {

namespace {

/// Everything the frame operations need at one parameter value.
struct Kinematics {
  CurveJet jet;
  Point p;
  Christoffel gamma;
  Mat3 g, phi;
  Vec3 xi, eta;
  double eps = 1.0;
  Vec3 T;  // υ′
  Vec3 A;  // ∇_υ′υ′
  double m = 0.0;
  double speed2 = 0.0;

  double inner(const Vec3& a, const Vec3& b) const { return a.dot(g * b); }
};

Kinematics kinematics(const StructureTensors& M, const ConnectionField& conn, const Curve& curve, double s) {
  Kinematics k;
  k.jet = curve.jet(s);
  k.p = Point(k.jet.position);
  require_in_domain(M, k.p);
  k.gamma = conn.at(k.p);
  k.g = M.metric(k.p);
  k.phi = M.phi(k.p);
  k.xi = M.xi(k.p);
  k.eta = M.eta(k.p);
  k.eps = M.epsilon;
  k.T = k.jet.d1;
  k.A = k.jet.d2 + k.gamma.contract(k.T, k.T);
  k.m = k.eta.dot(k.T);
  k.speed2 = k.inner(k.T, k.T);
  return k;
}

void require_unit_speed(const Kinematics& k, double s, const FrenetOptions& opt) {
  if (std::abs(k.speed2 - 1.0) > opt.unit_speed_tol) {
    std::ostringstream os;
    os << "curve is not unit speed at s = " << s << " (g(T,T) = " << k.speed2 << ")";
    throw HypothesisError(os.str());
  }
}

/// ∇_T(∇_T T), using the exact third derivative of the curve and a directional derivative of Γ.
Vec3 nabla_t_accel(const ConnectionField& conn, const Kinematics& k) {
  auto gamma_tt = [&](double t) { return Vec3(conn.at(Point(k.p.coords + t * k.T)).contract(k.T, k.T)); };
  const double h = numeric::coordinate_step(k.p.coords.cwiseAbs().maxCoeff()) / std::max(1.0, k.T.norm());
  const Vec3 d_accel = k.jet.d3 + numeric::richardson(gamma_tt, 0.0, h) + 2.0 * k.gamma.contract(k.T, k.jet.d2);
  return d_accel + k.gamma.contract(k.T, k.A);
}

/// m′ = d/ds η(υ′) = (∂η)(υ′, υ′) + η(υ″).
double m_prime(const StructureTensors& M, const Kinematics& k) {
  return k.T.dot(eta_jacobian(M, k.p) * k.T) + k.eta.dot(k.jet.d2);
}

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

double max_norm(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

struct FrameCore {
  Kinematics k;
  FrenetData f;
  Vec3 nabla_n;
};

FrameCore frenet_core(const StructureTensors& M, const ConnectionField& conn, const Curve& curve, double s,
                      const FrenetOptions& opt) {
  FrameCore c{kinematics(M, conn, curve, s), {}, {}};
  const Kinematics& k = c.k;
  require_unit_speed(k, s, opt);
  FrenetData& f = c.f;
  f.s = s;
  f.T = k.T;
  if (k.A.norm() < opt.kappa_min) {
    std::ostringstream os;
    os << "geodesic point at s = " << s << ": the Frenet frame is undefined";
    throw GeodesicError(os.str());
  }
  const double q = k.inner(k.A, k.A);
  f.kappa = std::sqrt(std::abs(q));
  if (f.kappa < opt.kappa_min) {
    std::ostringstream os;
    os << "principal normal is null at s = " << s;
    throw DegenerateError(os.str());
  }
  f.sign_n = q > 0 ? 1 : -1;
  f.N = k.A / f.kappa;

  const Vec3 nabla_a = nabla_t_accel(conn, k);
  const double kappa_prime = f.sign_n * k.inner(nabla_a, k.A) / f.kappa;
  c.nabla_n = nabla_a / f.kappa - k.A * kappa_prime / (f.kappa * f.kappa);
  const Vec3 r = c.nabla_n - k.inner(c.nabla_n, k.T) * k.T;

  const double delta = std::sqrt(std::abs(1.0 - k.eps * k.m * k.m));
  Vec3 b;
  if (delta > opt.delta_min) {
    // With A = a₂V₂ − b₂V₃ the binormal is ε(εb₂V₂ + a₂V₃)/κ.
    const Vec3 v2 = k.phi * k.T / delta;
    const Vec3 v3 = (k.xi - k.eps * k.m * k.T) / delta;
    const double a2 = k.inner(k.A, v2);
    const double b2 = -k.eps * k.inner(k.A, v3);
    b = k.eps * (k.eps * b2 * v2 + a2 * v3) / f.kappa;
  } else {
    // Metric volume form: Bᵏ = gᵏˡ (T × N)ₗ / √|det g|.
    b = k.g.inverse() * f.T.cross(f.N) / std::sqrt(std::abs(k.g.determinant()));
    f.structure_adapted = false;
  }
  const double bb = k.inner(b, b);
  f.B = b / std::sqrt(std::abs(bb));
  f.sign_b = bb > 0 ? 1 : -1;
  f.tau_signed = k.eps * f.sign_b * k.inner(r, f.B);
  f.tau = std::abs(f.tau_signed);
  return c;
}

struct Scalars {
  double m, mp, delta, theta, theta1, alpha, beta;
};

Scalars scalars(const StructureTensors& M, const ConnectionField& conn, const Kinematics& k) {
  Scalars sc{};
  sc.m = k.m;
  sc.mp = m_prime(M, k);
  sc.delta = std::sqrt(std::abs(1.0 - k.eps * k.m * k.m));
  sc.theta = k.inner(k.A, k.phi * k.T);
  sc.theta1 = sc.theta / (sc.delta * sc.delta);
  const auto ab = alpha_beta(M, conn, k.p);
  sc.alpha = ab.alpha;
  sc.beta = ab.beta;
  return sc;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

FrenetData frenet_direct(const StructureTensors& m, const Curve& curve, double s, const FrenetOptions& opt) {
  return frenet_core(m, ConnectionField::closed_form(m), curve, s, opt).f;
}

double FrenetResiduals::max() const { return std::max({tangent, normal, binormal, orthonormality}); }

FrenetResiduals frenet_residuals(const StructureTensors& m, const Curve& curve, const FrenetData& f,
                                 const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const FrameCore c = frenet_core(m, conn, curve, f.s, opt);
  const Kinematics& k = c.k;
  const double eps = k.eps;
  FrenetResiduals r;
  r.tangent = max_norm(k.A - f.kappa * f.N);
  r.normal = max_norm(c.nabla_n + f.sign_n * f.kappa * f.T - eps * f.tau_signed * f.B);
  auto binormal = [&](double t) { return frenet_core(m, conn, curve, t, opt).f.B; };
  const Vec3 nabla_b = curve.differentiate(binormal, f.s) + k.gamma.contract(k.T, f.B);
  r.binormal = max_norm(nabla_b + f.tau_signed * f.N);
  r.orthonormality = std::max({std::abs(k.inner(f.T, f.T) - 1.0), std::abs(k.inner(f.N, f.N) - f.sign_n),
                               std::abs(k.inner(f.B, f.B) - f.sign_b), std::abs(k.inner(f.T, f.N)),
                               std::abs(k.inner(f.T, f.B)), std::abs(k.inner(f.N, f.B))});
  return r;
}

// ---------------------------------------------------------------------------------------------

LegendreKappaTau legendre_kappa_tau(const StructureTensors& m, const Curve& curve, double s,
                                    const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const Kinematics k = kinematics(m, conn, curve, s);
  require_unit_speed(k, s, opt);
  if (std::abs(k.m) > opt.legendre_tol) {
    std::ostringstream os;
    os << "curve is not Legendre at s = " << s << " (eta(T) = " << k.m << ")";
    throw NotLegendreError(os.str());
  }
  auto theta_beta = [&](double t) {
    const Kinematics kt = kinematics(m, conn, curve, t);
    return Eigen::Vector2d(kt.inner(kt.A, kt.phi * kt.T), alpha_beta(m, conn, kt.p).beta);
  };
  const Eigen::Vector2d here = theta_beta(s);
  const Eigen::Vector2d d = curve.differentiate(theta_beta, s);
  const auto ab = alpha_beta(m, conn, k.p);
  const double theta = here[0], beta = ab.beta;
  const double signed_sq = theta * theta + k.eps * beta * beta;

  LegendreKappaTau r;
  r.theta = theta;
  r.theta_prime = d[0];
  r.kappa = std::sqrt(std::abs(signed_sq));
  if (r.kappa < opt.kappa_min) {
    std::ostringstream os;
    os << "geodesic point at s = " << s << ": theta^2 + eps beta^2 vanishes";
    throw GeodesicError(os.str());
  }
  const double wronskian = beta * d[0] - d[1] * theta;
  r.tau_signed = ab.alpha + wronskian / (r.kappa * r.kappa);
  r.tau_signed_alt = ab.alpha + wronskian / signed_sq;
  r.tau = std::abs(r.tau_signed);
  r.forms_disagree = std::abs(r.tau_signed - r.tau_signed_alt) > 1e-12 * std::max(1.0, std::abs(r.tau_signed));
  return r;
}

ReebDecomposition reeb_decomposition_legendre(const StructureTensors& m, const Curve& curve, double s,
                                              const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const FrameCore c = frenet_core(m, conn, curve, s, opt);
  if (c.f.sign_n != 1) throw DegenerateError("Reeb decomposition requires a spacelike principal normal");
  const LegendreKappaTau lk = legendre_kappa_tau(m, curve, s, opt);
  const double eps = c.k.eps;
  const double beta = alpha_beta(m, conn, c.k.p).beta;
  ReebDecomposition r;
  r.coeff_n = -eps * beta / lk.kappa;
  r.coeff_b = eps * lk.theta / lk.kappa;
  r.residual = max_norm(c.k.xi - r.coeff_n * c.f.N - r.coeff_b * c.f.B);
  return r;
}

// ---------------------------------------------------------------------------------------------

PhiFrameData vframe(const StructureTensors& m, const Curve& curve, double s, const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const Kinematics k = kinematics(m, conn, curve, s);
  require_unit_speed(k, s, opt);
  PhiFrameData r;
  r.s = s;
  r.m = k.m;
  r.delta = std::sqrt(std::abs(1.0 - k.eps * k.m * k.m));
  if (r.delta < opt.delta_min) {
    std::ostringstream os;
    os << "frame (T, phi T, xi) is degenerate at s = " << s << " (delta = " << r.delta << ")";
    throw DegenerateError(os.str());
  }
  r.V1 = k.T;
  r.V2 = k.phi * k.T / r.delta;
  r.V3 = (k.xi - k.eps * k.m * k.T) / r.delta;
  r.theta = k.inner(k.A, k.phi * k.T);
  r.theta1 = r.theta / (r.delta * r.delta);
  r.dxi_residual = max_norm(k.xi - (k.eps * k.m * r.V1 + r.delta * r.V3));
  const Vec3 v[3] = {r.V1, r.V2, r.V3};
  const double diag[3] = {1.0, 1.0, k.eps};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r.orthonormality = std::max(r.orthonormality, std::abs(k.inner(v[i], v[j]) - (i == j ? diag[i] : 0.0)));
  return r;
}

VFrameResiduals vframe_derivative_residuals(const StructureTensors& m, const Curve& curve, double s,
                                            const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const Kinematics k = kinematics(m, conn, curve, s);
  const PhiFrameData f = vframe(m, curve, s, opt);
  const Scalars sc = scalars(m, conn, k);
  auto frame = [&](double t) {
    const PhiFrameData ft = vframe(m, curve, t, opt);
    Mat3 out;
    out << ft.V1, ft.V2, ft.V3;
    return out;
  };
  const Mat3 d = curve.differentiate(frame, s);
  const Vec3 n1 = d.col(0) + k.gamma.contract(k.T, f.V1);
  const Vec3 n2 = d.col(1) + k.gamma.contract(k.T, f.V2);
  const Vec3 n3 = d.col(2) + k.gamma.contract(k.T, f.V3);
  const double c = sc.beta * sc.delta - sc.mp / sc.delta;
  const double e = sc.alpha + sc.m * sc.theta1;
  VFrameResiduals r;
  r.e1 = max_norm(n1 - (sc.delta * sc.theta1 * f.V2 - c * f.V3));
  r.e2 = max_norm(n2 - (-sc.delta * sc.theta1 * f.V1 + e * f.V3));
  r.e3 = max_norm(n3 - k.eps * (c * f.V1 - e * f.V2));
  return r;
}

GeneralKappaTau general_kappa_tau(const StructureTensors& m, const Curve& curve, double s,
                                  const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const Kinematics k = kinematics(m, conn, curve, s);
  require_unit_speed(k, s, opt);
  const Scalars sc = scalars(m, conn, k);
  if (sc.delta < opt.delta_min) {
    std::ostringstream os;
    os << "frame (T, phi T, xi) is degenerate at s = " << s;
    throw DegenerateError(os.str());
  }
  auto tracked = [&](double t) {
    const Scalars st = scalars(m, conn, kinematics(m, conn, curve, t));
    return Vec3(st.theta1, st.beta, st.mp * st.theta1 / (st.delta * st.delta));
  };
  const Vec3 d = curve.differentiate(tracked, s);
  const double d2 = sc.delta * sc.delta;
  const double u = sc.beta - sc.mp / d2;

  GeneralKappaTau r;
  r.m = sc.m;
  r.m_prime = sc.mp;
  r.delta = sc.delta;
  r.theta1 = sc.theta1;
  r.denominator = sc.theta1 * sc.theta1 + k.eps * u * u;
  r.kappa = sc.delta * std::sqrt(std::abs(r.denominator));
  if (r.kappa < opt.kappa_min) {
    std::ostringstream os;
    os << "geodesic point at s = " << s;
    throw GeodesicError(os.str());
  }
  if (std::abs(r.denominator) < 1e-10) {
    std::ostringstream os;
    os << "torsion formula is singular at s = " << s;
    throw DegenerateError(os.str());
  }
  const double numerator = (sc.beta * d[0] - d[1] * sc.theta1) - 2.0 * sc.mp * d[0] / d2 + d[2];
  r.tau_signed = sc.alpha + sc.m * sc.theta1 + numerator / r.denominator;
  r.tau = std::abs(r.tau_signed);
  return r;
}

GeneralReebDecomposition reeb_decomposition_general(const StructureTensors& m, const Curve& curve, double s,
                                                    const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const FrameCore c = frenet_core(m, conn, curve, s, opt);
  if (c.f.sign_n != 1) throw DegenerateError("Reeb decomposition requires a spacelike principal normal");
  const GeneralKappaTau gk = general_kappa_tau(m, curve, s, opt);
  const Scalars sc = scalars(m, conn, c.k);
  const double eps = c.k.eps;
  const double d2 = sc.delta * sc.delta;
  const double sign_tau = sgn(c.f.tau_signed);

  GeneralReebDecomposition r;
  r.m = sc.m;
  r.delta = sc.delta;
  r.eta_n = (sc.mp - sc.beta * d2) / gk.kappa;
  r.eta_b = eps * sign_tau * d2 * sc.theta1 / gk.kappa;
  const Vec3 b = sign_tau * c.f.B;
  r.residual = max_norm(c.k.xi - eps * (sc.m * c.f.T + r.eta_n * c.f.N) - r.eta_b * b);
  r.identity_residual = std::abs(r.eta_b * r.eta_b + eps * r.eta_n * r.eta_n - d2);
  return r;
}

// ---------------------------------------------------------------------------------------------

namespace {

struct NullVectors {
  Kinematics k;
  Vec3 U, V;
  std::string seed;
};

NullVectors null_vectors(const StructureTensors& M, const ConnectionField& conn, const Curve& curve, double s,
                         const FrenetOptions& opt) {
  if (M.epsilon != -1) throw HypothesisError("null frames need a timelike Reeb field (epsilon = -1)");
  NullVectors n{kinematics(M, conn, curve, s), {}, {}, {}};
  const Kinematics& k = n.k;
  const double t2 = k.T.squaredNorm();
  if (t2 == 0.0) throw DegenerateError("curve velocity vanishes");
  if (std::abs(k.speed2) > opt.null_tol * t2) {
    std::ostringstream os;
    os << "curve is not null at s = " << s << " (g(T,T) = " << k.speed2 << ")";
    throw HypothesisError(os.str());
  }
  // V from a transversal seed X: V = −(X − g(X,X)/(2g(X,T)) T)/g(X,T) is null with g(T,V) = −1.
  auto transversal = [&k](const Vec3& x) {
    const double xt = k.inner(x, k.T);
    return Vec3(-(x - k.inner(x, x) / (2.0 * xt) * k.T) / xt);
  };
  const double tn = std::sqrt(t2);
  if (std::abs(k.m) > 1e-6 * tn) {
    n.U = k.phi * k.T / std::abs(k.m);
    n.V = transversal(k.xi - k.inner(k.xi, n.U) * n.U);
    n.seed = "phi_T";
    return n;
  }
  const std::pair<const char*, Vec3> seeds[] = {
      {"xi", k.xi}, {"d1", Vec3::UnitX()}, {"d2", Vec3::UnitY()}, {"d3", Vec3::UnitZ()}};
  for (const auto& [name, x] : seeds) {
    if (std::abs(k.inner(x, k.T)) <= 1e-6 * x.norm() * tn) continue;
    n.V = transversal(x);
    n.seed = name;
    // Screen vector: project a candidate off span{T, V} (where g(T,V) = −1).
    const Vec3 candidates[] = {k.phi * k.T, Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    for (const Vec3& y : candidates) {
      const Vec3 u = y + k.inner(y, n.V) * k.T + k.inner(y, k.T) * n.V;
      const double uu = k.inner(u, u);
      if (uu > 1e-6 * u.squaredNorm()) {
        n.U = u / std::sqrt(uu);
        return n;
      }
    }
  }
  throw DegenerateError("null frame: screen seeds are all degenerate (phi T and xi parallel to T)");
}

}  // namespace

NullFrameData build_null_frame(const StructureTensors& m, const Curve& curve, double s, const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const NullVectors n = null_vectors(m, conn, curve, s, opt);
  const Kinematics& k = n.k;
  auto screen = [&](double t) { return null_vectors(m, conn, curve, t, opt).U; };
  const Vec3 nabla_u = curve.differentiate(screen, s) + k.gamma.contract(k.T, n.U);
  NullFrameData f;
  f.s = s;
  f.T = k.T;
  f.U = n.U;
  f.V = n.V;
  f.h = -k.inner(k.A, n.V);
  f.kappa1 = k.inner(k.A, n.U);
  f.tau1 = k.inner(nabla_u, n.V);
  f.screen_seed = n.seed;
  return f;
}

NullFrameResiduals null_frame_residuals(const StructureTensors& m, const Curve& curve, const NullFrameData& f,
                                        const FrenetOptions& opt) {
  const auto conn = ConnectionField::closed_form(m);
  const NullVectors n = null_vectors(m, conn, curve, f.s, opt);
  const Kinematics& k = n.k;
  NullFrameResiduals r;
  r.pairings = std::max({std::abs(k.inner(f.U, f.U) - 1.0), std::abs(k.inner(f.T, f.T)), std::abs(k.inner(f.V, f.V)),
                         std::abs(k.inner(f.T, f.V) + 1.0), std::abs(k.inner(f.T, f.U)), std::abs(k.inner(f.U, f.V))});
  r.tangent = max_norm(k.A - (f.h * f.T + f.kappa1 * f.U));
  auto frame = [&](double t) {
    const NullVectors nt = null_vectors(m, conn, curve, t, opt);
    Eigen::Matrix<double, 3, 2> out;
    out << nt.U, nt.V;
    return out;
  };
  const Eigen::Matrix<double, 3, 2> d = curve.differentiate(frame, f.s);
  const Vec3 nabla_u = d.col(0) + k.gamma.contract(k.T, f.U);
  const Vec3 nabla_v = d.col(1) + k.gamma.contract(k.T, f.V);
  r.screen = max_norm(nabla_u - (-f.tau1 * f.T + f.kappa1 * f.V));
  r.transversal = max_norm(nabla_v - (-f.h * f.V - f.tau1 * f.U));
  return r;
}

NullGeodesicReport null_legendre_geodesic_check(const StructureTensors& m, const Curve& curve,
                                                const std::vector<double>& grid, double tol,
                                                const FrenetOptions& opt) {
  if (grid.empty()) throw ValidationError("null_legendre_geodesic_check: empty grid");
  const auto conn = ConnectionField::closed_form(m);
  NullGeodesicReport r;
  for (double s : grid) {
    const NullVectors n = null_vectors(m, conn, curve, s, opt);
    const Kinematics& k = n.k;
    const double b3 = k.inner(k.A, n.U);
    const double a3 = -k.inner(k.A, n.V);
    r.max_abs_b3 = std::max(r.max_abs_b3, std::abs(b3));
    r.max_proportionality_defect = std::max(r.max_proportionality_defect, max_norm(k.A - a3 * k.T));
    r.max_abs_m = std::max(r.max_abs_m, std::abs(k.m));
  }
  r.legendre = r.max_abs_m < tol;
  if (!r.legendre) {
    std::ostringstream os;
    os << "not Legendre: max |eta(T)| = " << r.max_abs_m << "; b3 reported without a constraint";
    r.notes.push_back(os.str());
    r.notes.push_back("a timelike Reeb field leaves a positive-definite metric on ker eta, so no nonzero null "
                      "tangent can be Legendre");
  }
  return r;
}

}  // namespace acpm
