#include "acpm/connection.hpp"

#include <algorithm>
#include <cmath>

#include "acpm/errors.hpp"
#include "acpm/numeric.hpp"

namespace acpm {

namespace {

double max_abs(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

Mat3 jacobian_fd(const std::function<Vec3(const Point&)>& f, const Point& p) {
  Mat3 j;
  for (int l = 0; l < 3; ++l) {
    const double h = numeric::coordinate_step(p.coords[l]);
    auto along = [&](double t) {
      Point q = p;
      q.coords[l] = t;
      return Vec3(f(q));
    };
    j.col(l) = numeric::richardson(along, p.coords[l], h);
  }
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Christoffel symbols

Christoffel christoffel_from_partials(const Mat3& metric, const std::array<Mat3, 3>& partials) {
  Eigen::FullPivLU<Mat3> lu(metric);
  if (!lu.isInvertible()) throw DegenerateError("metric is singular; Christoffel symbols undefined");
  const Mat3 inv = lu.inverse();
  // Lowered symbols Γ_lij = ½(∂ᵢg_jl + ∂ⱼg_il − ∂ₗg_ij).
  std::array<Mat3, 3> lowered;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        lowered[l](i, j) = 0.5 * (partials[i](j, l) + partials[j](i, l) - partials[l](i, j));
  Christoffel c;
  for (int k = 0; k < 3; ++k) {
    Mat3 acc = Mat3::Zero();
    for (int l = 0; l < 3; ++l) acc += inv(k, l) * lowered[l];
    c.upper[k] = acc;
  }
  return c;
}

std::array<Mat3, 3> metric_partials_fd(const StructureTensors& m, const Point& p, double step_scale) {
  std::array<Mat3, 3> d;
  for (int l = 0; l < 3; ++l) {
    const double h = step_scale * std::max(1.0, std::abs(p.coords[l]));
    auto along = [&](double t) {
      Point q = p;
      q.coords[l] = t;
      return Mat3(m.metric(q));
    };
    d[l] = numeric::richardson(along, p.coords[l], h);
  }
  return d;
}

ConnectionField ConnectionField::closed_form(const StructureTensors& m) {
  const bool exact = static_cast<bool>(m.christoffel_table) || static_cast<bool>(m.metric_partials);
  return ConnectionField(m, exact ? ConnectionSource::closed_form : ConnectionSource::finite_difference, 1e-5);
}

ConnectionField ConnectionField::finite_difference(const StructureTensors& m, double step_scale) {
  return ConnectionField(m, ConnectionSource::finite_difference, step_scale);
}

Christoffel ConnectionField::at(const Point& p) const {
  require_in_domain(manifold_, p);
  if (source_ == ConnectionSource::closed_form) {
    if (manifold_.christoffel_table) return manifold_.christoffel_table(p);
    return christoffel_from_partials(manifold_.metric(p), manifold_.metric_partials(p));
  }
  return christoffel_from_partials(manifold_.metric(p), metric_partials_fd(manifold_, p, step_scale_));
}

Christoffel christoffel(const StructureTensors& m, const Point& p) { return ConnectionField::closed_form(m).at(p); }

// ---------------------------------------------------------------------------------------------
// Vector fields

Mat3 VectorField::jacobian_at(const Point& p) const {
  if (jacobian) return jacobian(p);
  return jacobian_fd(value, p);
}

VectorField coordinate_field(int index) {
  if (index < 0 || index > 2) throw ValidationError("coordinate field index must be 0, 1 or 2");
  Vec3 e = Vec3::Zero();
  e[index] = 1.0;
  return constant_field(e);
}

VectorField constant_field(const Vec3& components) {
  return {[components](const Point&) { return components; }, [](const Point&) { return Mat3::Zero().eval(); }};
}

VectorField reeb_field(const StructureTensors& m) {
  VectorField f{m.xi, {}};
  if (m.xi_jacobian) f.jacobian = m.xi_jacobian;
  return f;
}

std::array<Mat3, 3> phi_partials(const StructureTensors& m, const Point& p) {
  if (m.phi_partials) return m.phi_partials(p);
  std::array<Mat3, 3> d;
  for (int l = 0; l < 3; ++l) {
    const double h = numeric::coordinate_step(p.coords[l]);
    auto along = [&](double t) {
      Point q = p;
      q.coords[l] = t;
      return Mat3(m.phi(q));
    };
    d[l] = numeric::richardson(along, p.coords[l], h);
  }
  return d;
}

Mat3 eta_jacobian(const StructureTensors& m, const Point& p) {
  if (m.eta_jacobian) return m.eta_jacobian(p);
  return jacobian_fd(m.eta, p);
}

VectorField phi_field(const StructureTensors& m, const VectorField& x) {
  VectorField out;
  out.value = [m, x](const Point& p) { return Vec3(m.phi(p) * x.value(p)); };
  out.jacobian = [m, x](const Point& p) {
    const auto dphi = phi_partials(m, p);
    const Vec3 xv = x.value(p);
    Mat3 j = m.phi(p) * x.jacobian_at(p);
    for (int l = 0; l < 3; ++l) j.col(l) += dphi[l] * xv;
    return j;
  };
  return out;
}

Vec3 covariant_derivative(const ConnectionField& conn, const Point& p, const VectorField& x, const VectorField& y) {
  const Vec3 xv = x.value(p);
  return y.jacobian_at(p) * xv + conn.at(p).contract(xv, y.value(p));
}

Vec3 covariant_derivative(const StructureTensors& m, const Point& p, const VectorField& x, const VectorField& y) {
  return covariant_derivative(ConnectionField::closed_form(m), p, x, y);
}

Mat3 nabla_xi(const StructureTensors& m, const ConnectionField& conn, const Point& p) {
  const Christoffel gamma = conn.at(p);
  const Vec3 xi = m.xi(p);
  Mat3 a = m.xi_jacobian ? m.xi_jacobian(p) : jacobian_fd(m.xi, p);
  for (int k = 0; k < 3; ++k) a.row(k) += (gamma.upper[k] * xi).transpose();
  return a;
}

// ---------------------------------------------------------------------------------------------
// Traces, α and β

PseudoOrthonormalBasis pseudo_orthonormal_basis(const StructureTensors& m, const Point& p) {
  require_in_domain(m, p);
  const Mat3 g = m.metric(p);
  auto inner = [&g](const Vec3& a, const Vec3& b) { return a.dot(g * b); };
  std::vector<Vec3> remaining{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  PseudoOrthonormalBasis basis;
  for (int step = 0; step < 3; ++step) {
    int best = -1;
    double best_score = 0.0;
    Vec3 best_vec;
    for (int c = 0; c < static_cast<int>(remaining.size()); ++c) {
      Vec3 v = remaining[c];
      for (int i = 0; i < step; ++i) v -= basis.signs[i] * inner(v, basis.vectors[i]) * basis.vectors[i];
      const double score = std::abs(inner(v, v)) / v.squaredNorm();
      if (best < 0 || score > best_score) {
        best = c;
        best_score = score;
        best_vec = v;
      }
    }
    const double q = inner(best_vec, best_vec);
    if (best_score < 1e-12) throw DegenerateError("cannot build a pseudo-orthonormal basis: metric degenerate");
    basis.vectors[step] = best_vec / std::sqrt(std::abs(q));
    basis.signs[step] = q > 0 ? 1 : -1;
    remaining.erase(remaining.begin() + best);
  }
  return basis;
}

double metric_trace(const StructureTensors& m, const Point& p, const Mat3& endomorphism) {
  const auto basis = pseudo_orthonormal_basis(m, p);
  const Mat3 g = m.metric(p);
  double trace = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& e = basis.vectors[i];
    trace += basis.signs[i] * (endomorphism * e).dot(g * e);
  }
  return trace;
}

AlphaBeta alpha_beta(const StructureTensors& m, const ConnectionField& conn, const Point& p) {
  const Mat3 a = nabla_xi(m, conn, p);
  const double half_eps = 0.5 * m.epsilon;
  return {half_eps * metric_trace(m, p, m.phi(p) * a), half_eps * metric_trace(m, p, a)};
}

AlphaBeta alpha_beta(const StructureTensors& m, const Point& p) {
  return alpha_beta(m, ConnectionField::closed_form(m), p);
}

// ---------------------------------------------------------------------------------------------
// Residuals of the normal-structure identities

double nabla_xi_residual(const StructureTensors& m, const Point& p, const Vec3& x) {
  const auto conn = ConnectionField::closed_form(m);
  const auto ab = alpha_beta(m, conn, p);
  const double eps = m.epsilon;
  const Vec3 xi = m.xi(p);
  const Vec3 lhs = nabla_xi(m, conn, p) * x;
  const Vec3 rhs = -eps * ab.alpha * (m.phi(p) * x) + eps * ab.beta * (x - m.eta(p).dot(x) * xi);
  return max_abs(lhs - rhs);
}

double phi_commutation_residual(const StructureTensors& m, const Point& p, const Vec3& x) {
  const auto conn = ConnectionField::closed_form(m);
  const Mat3 a = nabla_xi(m, conn, p);
  const Mat3 f = m.phi(p);
  return max_abs(a * (f * x) - f * (a * x));
}

namespace {

// (∇_Xφ)Y for vectors at p (both extended with constant coefficients).
Vec3 nabla_phi(const StructureTensors& m, const ConnectionField& conn, const Point& p, const Vec3& x,
               const Vec3& y) {
  const auto dphi = phi_partials(m, p);
  const Christoffel gamma = conn.at(p);
  const Mat3 f = m.phi(p);
  Vec3 directional = Vec3::Zero();  // X(φ) Y
  for (int l = 0; l < 3; ++l) directional += x[l] * (dphi[l] * y);
  return directional + gamma.contract(x, f * y) - f * gamma.contract(x, y);
}

}  // namespace

double nabla_phi_residual(const StructureTensors& m, const ConnectionField& conn, const Point& p, const Vec3& x,
                          const Vec3& y) {
  const auto ab = alpha_beta(m, conn, p);
  const double eps = m.epsilon;
  const Mat3 f = m.phi(p);
  const Vec3 xi = m.xi(p);
  const double eta_y = m.eta(p).dot(y);
  const Vec3 rhs = ab.beta * (m.g(p, f * x, y) * xi - eps * eta_y * (f * x)) +
                   ab.alpha * (m.g(p, x, y) * xi - eps * eta_y * x);
  return max_abs(nabla_phi(m, conn, p, x, y) - rhs);
}

double nabla_phi_residual(const StructureTensors& m, const Point& p, const Vec3& x, const Vec3& y) {
  return nabla_phi_residual(m, ConnectionField::closed_form(m), p, x, y);
}

double general_nabla_phi_residual(const StructureTensors& m, const Point& p, const Vec3& x, const Vec3& y) {
  const auto conn = ConnectionField::closed_form(m);
  const Mat3 f = m.phi(p);
  const Vec3 phi_nabla_xi = f * (nabla_xi(m, conn, p) * x);
  const Vec3 rhs = -m.eta(p).dot(y) * phi_nabla_xi + m.epsilon * m.g(p, phi_nabla_xi, y) * m.xi(p);
  return max_abs(nabla_phi(m, conn, p, x, y) - rhs);
}

double normality_residual(const StructureTensors& m, const Point& p, const VectorField& x, const VectorField& y) {
  require_in_domain(m, p);
  auto bracket = [&p](const VectorField& u, const VectorField& v) -> Vec3 {
    return v.jacobian_at(p) * u.value(p) - u.jacobian_at(p) * v.value(p);
  };
  const Mat3 f = m.phi(p);
  const VectorField fx = phi_field(m, x);
  const VectorField fy = phi_field(m, y);
  const Vec3 xy = bracket(x, y);
  const Vec3 nijenhuis = bracket(fx, fy) - f * bracket(fx, y) - f * bracket(x, fy) + f * (f * xy);

  const Vec3 eta = m.eta(p);
  const Mat3 jeta = eta_jacobian(m, p);
  const Vec3 xv = x.value(p), yv = y.value(p);
  // X(η(Y)) = (∂ₗη_i) Xˡ Yⁱ + η_i X(Yⁱ)
  const double x_eta_y = yv.dot(jeta * xv) + eta.dot(y.jacobian_at(p) * xv);
  const double y_eta_x = xv.dot(jeta * yv) + eta.dot(x.jacobian_at(p) * yv);
  const double d_eta = 0.5 * (x_eta_y - y_eta_x - eta.dot(xy));
  return max_abs(nijenhuis + 2.0 * d_eta * m.xi(p));
}

double normality_residual(const StructureTensors& m, const Point& p, const Vec3& x, const Vec3& y) {
  return normality_residual(m, p, constant_field(x), constant_field(y));
}

double torsion_residual(const Christoffel& gamma) {
  double r = 0.0;
  for (int k = 0; k < 3; ++k) r = std::max(r, (gamma.upper[k] - gamma.upper[k].transpose()).cwiseAbs().maxCoeff());
  return r;
}

double metric_compatibility_residual(const StructureTensors& m, const ConnectionField& conn, const Point& p) {
  const auto dg = metric_partials_fd(m, p);
  const Christoffel gamma = conn.at(p);
  const Mat3 g = m.metric(p);
  double r = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = dg[k](i, j);
        for (int l = 0; l < 3; ++l) v -= gamma(l, k, i) * g(l, j) + gamma(l, k, j) * g(i, l);
        r = std::max(r, std::abs(v));
      }
  return r;
}

QuasiSasakianReport check_quasi_sasakian(const StructureTensors& m, const std::vector<Point>& probes, double tol) {
  const auto conn = ConnectionField::closed_form(m);
  QuasiSasakianReport r;
  for (const auto& p : probes) {
    require_in_domain(m, p);
    r.max_abs_beta = std::max(r.max_abs_beta, std::abs(alpha_beta(m, conn, p).beta));
    const Vec3 xi = m.xi(p);
    auto alpha_along = [&](double t) { return alpha_beta(m, conn, Point(p.coords + t * xi)).alpha; };
    const double h = numeric::coordinate_step(p.coords.cwiseAbs().maxCoeff());
    r.max_abs_xi_alpha = std::max(r.max_abs_xi_alpha, std::abs(numeric::richardson(alpha_along, 0.0, h)));
  }
  r.quasi_sasakian = r.max_abs_beta < tol && r.max_abs_xi_alpha < tol;
  return r;
}

}  // namespace acpm
