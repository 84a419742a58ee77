#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "acpm/manifold.hpp"
#include "acpm/numeric.hpp"

namespace acpm {

/// Position and coordinate derivatives υ′, υ″, υ‴ at one parameter value.
struct CurveJet {
  Vec3 position = Vec3::Zero();
  Vec3 d1 = Vec3::Zero();
  Vec3 d2 = Vec3::Zero();
  Vec3 d3 = Vec3::Zero();
};

/// A parametrized path s ↦ υ(s) on the open interval (s_min, s_max).
///
/// The jet evaluator is the single source of truth; it is exact for expression-backed and
/// closure-backed curves and stencil-based for sampled ones.
class Curve {
 public:
  using JetFn = std::function<CurveJet(double)>;

  Curve() = default;
  Curve(std::string label, double s_min, double s_max, JetFn jet);

  const std::string& label() const { return label_; }
  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }
  bool contains(double s) const { return s > s_min_ && s < s_max_; }

  /// Throws DomainError outside the open parameter interval.
  CurveJet jet(double s) const;
  Point position(double s) const { return Point(jet(s).position); }

  /// Derivative at s of a quantity f(t) defined along the curve, with stencils kept inside the
  /// parameter interval (one-sided near its ends).
  template <class F>
  auto differentiate(F&& f, double s) const {
    return numeric::derivative_within(f, s, s_min_, s_max_, numeric::kCurveStep);
  }

 private:
  std::string label_;
  double s_min_ = -std::numeric_limits<double>::infinity();
  double s_max_ = std::numeric_limits<double>::infinity();
  JetFn jet_;
};

/// Components given as expressions in s; derivatives are symbolic.
Curve expression_curve(const std::string& label, const std::array<std::string, 3>& components, double s_min,
                       double s_max);

/// Curve through tabulated (s, x, y, z) rows with strictly increasing s. Between nodes the
/// curve is the quartic through the five nearest rows, so at a node its derivatives are the
/// 5-point central differences. At least five rows are required.
Curve sampled_curve(const std::string& label, const std::vector<double>& s, const std::vector<Vec3>& points);

/// Reads "s,x,y,z" CSV (an optional header row is skipped).
Curve read_curve_csv(std::istream& in, const std::string& label);
Curve read_curve_csv_file(const std::string& path);
void write_curve_csv(std::ostream& out, const Curve& curve, const std::vector<double>& grid);

/// Solution of υ″ = −Γ(υ′, υ′) with υ(s0) = p0, υ′(s0) = v0, valid on (s_min, s_max). Each
/// evaluation integrates from s0 with a fixed number of RK4 steps so the result is a smooth
/// function of s.
Curve geodesic_curve(const StructureTensors& m, const Point& p0, const Vec3& v0, double s0, double s_min,
                     double s_max, int steps = 400);

struct CurveSample {
  double s = 0.0;
  Point position;
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double m = 0.0;       // η(υ′)
  double speed2 = 0.0;  // g(υ′, υ′)
};

/// Throws DomainError when s is outside the curve interval or υ(s) outside the chart.
CurveSample sample(const StructureTensors& m, const Curve& curve, double s);

struct LegendreReport {
  bool legendre = false;
  double max_abs_m = 0.0;
  /// Chart-specific Legendre conditions for the built-ins: on N³ |2υ₁′υ₂ + υ₃′| and
  /// |υ₁′² + υ₂′² − exp(−2υ₃)|; on Q³ |υ₃′ − 2υ₁υ₂′| and |υ₁′² + υ₂′² − υ₁⁻²|.
  bool has_chart_conditions = false;
  double chart_condition_1 = 0.0;
  double chart_condition_2 = 0.0;
};

LegendreReport is_legendre(const StructureTensors& m, const Curve& curve, const std::vector<double>& grid, double tol);

struct UnitSpeedReport {
  bool unit_speed = false;
  double max_deviation = 0.0;  // max |g(υ′, υ′) − 1|
};

UnitSpeedReport is_unit_speed(const StructureTensors& m, const Curve& curve, const std::vector<double>& grid,
                              double tol);

/// Arc-length reparametrization t(s) = ∫ₛ₀ˢ √|g(υ′, υ′)|, so |g(υ̃′, υ̃′)| = 1 and t(s0) = 0.
/// The speed must keep one sign and stay away from zero on the grid, otherwise DegenerateError.
Curve reparametrize_arclength(const StructureTensors& m, const Curve& curve, double s0,
                              const std::vector<double>& grid);

}  // namespace acpm
