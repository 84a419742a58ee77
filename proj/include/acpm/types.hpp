#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

namespace acpm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Chart coordinates (x, y, z) of a point.
struct Point {
  Vec3 coords = Vec3::Zero();

  Point() = default;
  explicit Point(const Vec3& c) : coords(c) {}
  Point(double x, double y, double z) : coords(x, y, z) {}

  double x() const { return coords[0]; }
  double y() const { return coords[1]; }
  double z() const { return coords[2]; }
};

/// Components in the coordinate frame ∂₁, ∂₂, ∂₃ at a base point.
struct TangentVector {
  Point base;
  Vec3 components = Vec3::Zero();
};

/// Christoffel symbols Γᵏᵢⱼ stored as three symmetric matrices: `upper[k](i, j)`.
struct Christoffel {
  std::array<Mat3, 3> upper{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};

  double operator()(int k, int i, int j) const { return upper[k](i, j); }
  double& operator()(int k, int i, int j) { return upper[k](i, j); }

  /// Γᵏᵢⱼ Xⁱ Yʲ
  Vec3 contract(const Vec3& x, const Vec3& y) const {
    return {x.dot(upper[0] * y), x.dot(upper[1] * y), x.dot(upper[2] * y)};
  }
};

using ScalarFn = std::function<double(double)>;

}  // namespace acpm
