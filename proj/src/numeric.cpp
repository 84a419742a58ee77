#include "acpm/numeric.hpp"

#include <stdexcept>

#include "acpm/errors.hpp"

namespace acpm::numeric {

CumulativeIntegral::CumulativeIntegral(ScalarFn f, double a, double b, int cells)
    : f_(std::move(f)), a_(a), b_(b) {
  if (!(b > a) || cells < 1) throw ValidationError("cumulative integral needs a < b and at least one cell");
  width_ = (b - a) / cells;
  table_.resize(cells + 1);
  table_[0] = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double t0 = a + i * width_;
    table_[i + 1] = table_[i] + simpson(f_, t0, t0 + width_, 2);
  }
}

double CumulativeIntegral::operator()(double s) const {
  const double slack = 1e-9 * (b_ - a_);
  if (s < a_ - slack || s > b_ + slack) throw DomainError("integration point outside the tabulated range");
  const int last = cells() - 1;
  const int cell = std::clamp(static_cast<int>(std::floor((s - a_) / width_)), 0, last);
  const double t0 = a_ + cell * width_;
  if (s == t0) return table_[cell];
  return table_[cell] + simpson(f_, t0, s, 2);
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 1) throw ValidationError("grid needs at least one point");
  if (!(hi > lo)) throw ValidationError("grid interval must satisfy from < to");
  const double inset = 1e-6 * (hi - lo);
  const double a = lo + inset, b = hi - inset;
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = 0.5 * (a + b);
    return grid;
  }
  for (int i = 0; i < count; ++i) grid[i] = a + (b - a) * i / (count - 1);
  return grid;
}

}  // namespace acpm::numeric
