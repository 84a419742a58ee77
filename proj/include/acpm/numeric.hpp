#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "acpm/types.hpp"

namespace acpm::numeric {

/// Default finite-difference step for chart coordinates.
inline double coordinate_step(double coordinate) { return 1e-5 * std::max(1.0, std::abs(coordinate)); }

/// Default step for derivatives of derived scalar quantities along a curve parameter.
inline constexpr double kCurveStep = 1e-3;

/// Central difference at h and h/2 combined by one Richardson level (O(h⁴)).
/// Works for any value type closed under +, − and scalar multiplication.
template <class F>
auto richardson(F&& f, double x, double h) {
  using R = std::decay_t<decltype(f(x))>;
  const R coarse = R((f(x + h) - f(x - h)) / (2.0 * h));
  const R fine = R((f(x + 0.5 * h) - f(x - 0.5 * h)) / h);
  return R((4.0 * fine - coarse) / 3.0);
}

/// Derivative of f on the open interval (lo, hi): the central Richardson rule when [x − h, x + h]
/// fits inside, otherwise the one-sided 5-point rule pointing into the interval, at steps h and
/// h/2 combined by one Richardson level (O(h⁵); the one-sided error constant is large).
template <class F>
auto derivative_within(F&& f, double x, double lo, double hi, double h) {
  using R = std::decay_t<decltype(f(x))>;
  if (x - h > lo && x + h < hi) return richardson(f, x, h);
  const double room_up = hi - x, room_down = x - lo;
  const double dir = room_up >= room_down ? 1.0 : -1.0;
  const double step = dir * std::min(h, 0.24 * std::max(room_up, room_down));
  const R f0 = f(x);
  auto one_sided = [&](double k) {
    return R((-25.0 * f0 + 48.0 * f(x + k) - 36.0 * f(x + 2 * k) + 16.0 * f(x + 3 * k) - 3.0 * f(x + 4 * k)) /
             (12.0 * k));
  };
  return R((16.0 * one_sided(0.5 * step) - one_sided(step)) / 15.0);
}

/// Second derivative from the 5-point stencil (O(h⁴)).
template <class F>
auto second_derivative(F&& f, double x, double h) {
  using R = std::decay_t<decltype(f(x))>;
  const R f0 = f(x);
  return R((-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f0 + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h));
}

/// Composite Simpson rule with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

struct QuadratureResult {
  double value = 0.0;
  int panels = 0;
  double refinement_change = 0.0;  // |S(4n) − S(n)| at convergence
};

/// Simpson with 4× refinement until two successive values agree to `tol`.
template <class F>
QuadratureResult simpson_converged(F&& f, double a, double b, double tol = 1e-12, int start = 16,
                                   int max_panels = 1 << 22) {
  int n = start;
  double prev = simpson(f, a, b, n);
  while (true) {
    const int next = 4 * n;
    const double cur = simpson(f, a, b, next);
    const double change = std::abs(cur - prev);
    if (change <= tol * std::max(1.0, std::abs(cur)) || next >= max_panels) return {cur, next, change};
    n = next;
    prev = cur;
  }
}

/// Tabulated antiderivative F(s) = ∫ₐˢ f on [a, b]; evaluation between nodes adds a local
/// two-panel Simpson term, so F is smooth inside each cell and continuous across cells.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(ScalarFn f, double a, double b, int cells);

  double operator()(double s) const;
  /// ∫ from s0 to s.
  double between(double s0, double s) const { return (*this)(s) - (*this)(s0); }
  double lower() const { return a_; }
  double upper() const { return b_; }
  int cells() const { return static_cast<int>(table_.size()) - 1; }

 private:
  ScalarFn f_;
  double a_ = 0.0, b_ = 0.0, width_ = 0.0;
  std::vector<double> table_;
};

/// Uniform grid of `count` points on [lo, hi] with both ends inset by 1e−6 of the range.
std::vector<double> uniform_grid(double lo, double hi, int count);

}  // namespace acpm::numeric
