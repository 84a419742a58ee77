#include "acpm/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "acpm/connection.hpp"
#include "acpm/errors.hpp"
#include "acpm/expr.hpp"
#include "acpm/numeric.hpp"

namespace acpm {

Curve::Curve(std::string label, double s_min, double s_max, JetFn jet)
    : label_(std::move(label)), s_min_(s_min), s_max_(s_max), jet_(std::move(jet)) {
  if (!(s_min < s_max)) throw ValidationError("curve '" + label_ + "': empty parameter interval");
  if (!jet_) throw ValidationError("curve '" + label_ + "': missing evaluator");
}

CurveJet Curve::jet(double s) const {
  if (!contains(s))
    throw DomainError("curve '" + label_ + "': parameter " + std::to_string(s) + " outside (" +
                      std::to_string(s_min_) + ", " + std::to_string(s_max_) + ")");
  return jet_(s);
}

// ---------------------------------------------------------------------------------------------

Curve expression_curve(const std::string& label, const std::array<std::string, 3>& components, double s_min,
                       double s_max) {
  std::array<std::array<expr::Expr, 4>, 3> d;
  for (int i = 0; i < 3; ++i) {
    d[i][0] = expr::parse(components[i]);
    for (const char* v : {"x", "y", "z"})
      if (d[i][0].depends_on(*expr::var_from_name(v)))
        throw ValidationError("curve component '" + components[i] + "' may only depend on s");
    for (int k = 1; k < 4; ++k) d[i][k] = expr::differentiate(d[i][k - 1], expr::Var::s);
  }
  return Curve(label, s_min, s_max, [d](double s) {
    const auto b = expr::Bindings::at_parameter(s);
    CurveJet j;
    for (int i = 0; i < 3; ++i) {
      j.position[i] = d[i][0].eval(b);
      j.d1[i] = d[i][1].eval(b);
      j.d2[i] = d[i][2].eval(b);
      j.d3[i] = d[i][3].eval(b);
    }
    return j;
  });
}

Curve sampled_curve(const std::string& label, const std::vector<double>& s, const std::vector<Vec3>& points) {
  if (s.size() != points.size()) throw ValidationError("sampled curve: parameter and point counts differ");
  if (s.size() < 5) throw ValidationError("sampled curve: at least five rows are required");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) throw ValidationError("sampled curve: parameter values must increase strictly");

  return Curve(label, s.front(), s.back(), [s, points](double t) {
    const auto upper = std::lower_bound(s.begin(), s.end(), t);
    auto nearest = static_cast<long>(upper - s.begin());
    if (nearest > 0 && (nearest == static_cast<long>(s.size()) || t - s[nearest - 1] < s[nearest] - t)) --nearest;
    const long first = std::clamp<long>(nearest - 2, 0, static_cast<long>(s.size()) - 5);
    const double origin = s[first];
    // Quartic p(u) = Σ cₖ uᵏ in the local variable u = t − origin.
    Eigen::Matrix<double, 5, 5> vandermonde;
    Eigen::Matrix<double, 5, 3> rhs;
    for (int r = 0; r < 5; ++r) {
      const double u = s[first + r] - origin;
      double power = 1.0;
      for (int c = 0; c < 5; ++c, power *= u) vandermonde(r, c) = power;
      rhs.row(r) = points[first + r].transpose();
    }
    const Eigen::Matrix<double, 5, 3> coef = vandermonde.fullPivLu().solve(rhs);
    const double u = t - origin;
    CurveJet j;
    for (int i = 0; i < 3; ++i) {
      const auto c = coef.col(i);
      j.position[i] = c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * c[4])));
      j.d1[i] = c[1] + u * (2 * c[2] + u * (3 * c[3] + u * 4 * c[4]));
      j.d2[i] = 2 * c[2] + u * (6 * c[3] + u * 12 * c[4]);
      j.d3[i] = 6 * c[3] + u * 24 * c[4];
    }
    return j;
  });
}

Curve read_curve_csv(std::istream& in, const std::string& label) {
  std::vector<double> s;
  std::vector<Vec3> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::array<double, 4> row{};
    std::stringstream ss(line);
    std::string cell;
    int n = 0;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      if (n >= 4) {
        numeric = false;
        break;
      }
      std::istringstream cs(cell);
      cs.imbue(std::locale::classic());
      if (!(cs >> row[n]) || !(cs >> std::ws).eof()) numeric = false;
      ++n;
    }
    if (!numeric || n != 4) {
      if (s.empty() && pts.empty() && line_no == 1) continue;  // header
      throw ValidationError("curve CSV line " + std::to_string(line_no) + ": expected four numbers s,x,y,z");
    }
    s.push_back(row[0]);
    pts.emplace_back(row[1], row[2], row[3]);
  }
  return sampled_curve(label, s, pts);
}

Curve read_curve_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open curve file '" + path + "'");
  return read_curve_csv(in, path);
}

void write_curve_csv(std::ostream& out, const Curve& curve, const std::vector<double>& grid) {
  out << "s,x,y,z\n";
  char buf[128];
  for (double s : grid) {
    const Vec3 p = curve.jet(s).position;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s, p[0], p[1], p[2]);
    out << buf;
  }
}

// ---------------------------------------------------------------------------------------------

Curve geodesic_curve(const StructureTensors& m, const Point& p0, const Vec3& v0, double s0, double s_min,
                     double s_max, int steps) {
  if (!(s0 > s_min && s0 < s_max)) throw ValidationError("geodesic: s0 must lie inside the interval");
  if (steps < 1) throw ValidationError("geodesic: step count must be positive");
  require_in_domain(m, p0);
  const auto conn = ConnectionField::closed_form(m);
  auto accel = [conn](const Vec3& x, const Vec3& v) -> Vec3 { return -conn.at(Point(x)).contract(v, v); };
  return Curve("geodesic", s_min, s_max, [=](double s) {
    Vec3 x = p0.coords, v = v0;
    const double h = (s - s0) / steps;
    for (int i = 0; i < steps; ++i) {
      const Vec3 k1x = v, k1v = accel(x, v);
      const Vec3 k2x = v + 0.5 * h * k1v, k2v = accel(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
      const Vec3 k3x = v + 0.5 * h * k2v, k3v = accel(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
      const Vec3 k4x = v + h * k3v, k4v = accel(x + h * k3x, v + h * k3v);
      x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
      v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    CurveJet j;
    j.position = x;
    j.d1 = v;
    j.d2 = accel(x, v);
    // d/ds[−Γ(υ)(v, v)] = −(∂_v Γ)(v, v) − 2Γ(v, υ″)
    auto gamma_along = [&](double t) { return Vec3(conn.at(Point(x + t * v)).contract(v, v)); };
    const double hh = numeric::coordinate_step(x.cwiseAbs().maxCoeff()) / std::max(1.0, v.norm());
    j.d3 = -numeric::richardson(gamma_along, 0.0, hh) - 2.0 * conn.at(Point(x)).contract(v, j.d2);
    return j;
  });
}

// ---------------------------------------------------------------------------------------------

CurveSample sample(const StructureTensors& m, const Curve& curve, double s) {
  const CurveJet j = curve.jet(s);
  CurveSample out;
  out.s = s;
  out.position = Point(j.position);
  require_in_domain(m, out.position);
  out.velocity = j.d1;
  out.acceleration = j.d2;
  out.m = m.eta(out.position).dot(j.d1);
  out.speed2 = m.g(out.position, j.d1, j.d1);
  return out;
}

LegendreReport is_legendre(const StructureTensors& m, const Curve& curve, const std::vector<double>& grid,
                           double tol) {
  if (grid.empty()) throw ValidationError("is_legendre: empty grid");
  LegendreReport r;
  r.has_chart_conditions = m.kind != BuiltinKind::none;
  for (double s : grid) {
    const CurveSample c = sample(m, curve, s);
    r.max_abs_m = std::max(r.max_abs_m, std::abs(c.m));
    const Vec3& p = c.position.coords;
    const Vec3& d = c.velocity;
    const double planar = d[0] * d[0] + d[1] * d[1];
    if (m.kind == BuiltinKind::n3) {
      r.chart_condition_1 = std::max(r.chart_condition_1, std::abs(2 * d[0] * p[1] + d[2]));
      r.chart_condition_2 = std::max(r.chart_condition_2, std::abs(planar - std::exp(-2 * p[2])));
    } else if (m.kind == BuiltinKind::q3) {
      r.chart_condition_1 = std::max(r.chart_condition_1, std::abs(d[2] - 2 * p[0] * d[1]));
      r.chart_condition_2 = std::max(r.chart_condition_2, std::abs(planar - 1.0 / (p[0] * p[0])));
    }
  }
  r.legendre = r.max_abs_m < tol;
  return r;
}

UnitSpeedReport is_unit_speed(const StructureTensors& m, const Curve& curve, const std::vector<double>& grid,
                              double tol) {
  if (grid.empty()) throw ValidationError("is_unit_speed: empty grid");
  UnitSpeedReport r;
  for (double s : grid) r.max_deviation = std::max(r.max_deviation, std::abs(sample(m, curve, s).speed2 - 1.0));
  r.unit_speed = r.max_deviation < tol;
  return r;
}

// ---------------------------------------------------------------------------------------------

Curve reparametrize_arclength(const StructureTensors& m, const Curve& curve, double s0,
                              const std::vector<double>& grid) {
  if (grid.size() < 2) throw ValidationError("reparametrize_arclength: grid needs at least two points");
  const double a = grid.front(), b = grid.back();
  if (!(s0 >= a && s0 <= b)) throw ValidationError("reparametrize_arclength: s0 outside the grid");

  int sign = 0;
  for (double s : grid) {
    const CurveSample c = sample(m, curve, s);
    const double scale = std::max(1.0, c.velocity.squaredNorm());
    if (std::abs(c.speed2) < 1e-8 * scale)
      throw DegenerateError("reparametrize_arclength: curve is null at s = " + std::to_string(s));
    const int here = c.speed2 > 0 ? 1 : -1;
    if (sign != 0 && here != sign)
      throw DegenerateError("reparametrize_arclength: causal character changes at s = " + std::to_string(s));
    sign = here;
  }

  auto speed = [m, curve](double s) {
    const CurveJet j = curve.jet(s);
    return std::sqrt(std::abs(m.g(Point(j.position), j.d1, j.d1)));
  };
  const int cells = std::max<int>(2000, 8 * static_cast<int>(grid.size()));
  const auto arc = std::make_shared<numeric::CumulativeIntegral>(speed, a, b, cells);
  const double offset = (*arc)(s0);
  const double t_min = (*arc)(a) - offset, t_max = (*arc)(b) - offset;

  auto parameter_of = [arc, offset, a, b, speed](double t) {
    // Bracketed Newton on F(s) − F(s0) = t; F is increasing.
    double lo = a, hi = b;
    double s = a + (b - a) * (t - ((*arc)(a) - offset)) / ((*arc)(b) - (*arc)(a));
    for (int it = 0; it < 100; ++it) {
      const double f = (*arc)(s) - offset - t;
      if (f > 0) hi = s; else lo = s;
      double next = s - f / speed(s);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-15 * std::max(1.0, std::abs(s))) return next;
      s = next;
    }
    return s;
  };

  const auto conn = ConnectionField::closed_form(m);
  // Coordinate derivatives as functions of the old parameter s: υ̃′ = υ′/σ and
  // υ̃″ = (υ″ − υ′ σ_s/σ)/σ² with σ_s = sign · g(∇_υ′υ′, υ′)/σ.
  auto second = [m, curve, conn, sign](double s) {
    const CurveJet j = curve.jet(s);
    const Point p(j.position);
    const double sigma = std::sqrt(std::abs(m.g(p, j.d1, j.d1)));
    const Vec3 accel = j.d2 + conn.at(p).contract(j.d1, j.d1);
    const double sigma_s = sign * m.g(p, accel, j.d1) / sigma;
    return Vec3((j.d2 - j.d1 * sigma_s / sigma) / (sigma * sigma));
  };

  return Curve(curve.label() + "_arclength", t_min, t_max, [=](double t) {
    const double s = parameter_of(t);
    const CurveJet j = curve.jet(s);
    const double sigma = speed(s);
    CurveJet out;
    out.position = j.position;
    out.d1 = j.d1 / sigma;
    out.d2 = second(s);
    out.d3 = curve.differentiate(second, s) / sigma;
    return out;
  });
}

}  // namespace acpm
