#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace surfup {

using Point3 = Eigen::Vector3d;

/// Axis-aligned box that encloses a set of points exactly.
struct BoundingBox {
  Point3 min = Point3::Zero();
  Point3 max = Point3::Zero();

  double diagonal() const { return (max - min).norm(); }
  Point3 center() const { return 0.5 * (min + max); }
};

/// Ordered, non-empty list of finite points. The bounding box is kept in
/// sync with the points.
class PointCloud {
public:
  /// Throws EmptyCloud for an empty list and DegenerateInput for a
  /// non-finite coordinate.
  explicit PointCloud(std::vector<Point3> points);

  std::size_t size() const noexcept { return points_.size(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point3> points() const noexcept { return points_; }
  const BoundingBox& bbox() const noexcept { return bbox_; }

  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.points_ == b.points_;
  }

private:
  std::vector<Point3> points_;
  BoundingBox bbox_;
};

/// Two 3-vectors of the continuous 6D rotation representation.
struct Rotation6D {
  Eigen::Vector3d a1;
  Eigen::Vector3d a2;
};

/// Orthonormal 3x3 matrix with determinant +1.
class RotationMatrix {
public:
  RotationMatrix() : m_(Eigen::Matrix3d::Identity()) {}

  /// Trusts the caller; use decode_rotation() or from_columns() for
  /// checked construction.
  static RotationMatrix unchecked(const Eigen::Matrix3d& m) {
    RotationMatrix r;
    r.m_ = m;
    return r;
  }

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }
  Eigen::Vector3d column(int c) const { return m_.col(c); }
  double operator()(int r, int c) const { return m_(r, c); }

  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return m_ * v; }

private:
  Eigen::Matrix3d m_;
};

/// Coefficients a_1..a_16 of the bicubic height field. Entry 4*j + i
/// multiplies u^i v^j.
using BicubicCoeffs = std::array<double, 16>;
using BicubicEmbedding = std::array<double, 16>;

constexpr std::size_t coeff_index(int u_power, int v_power) {
  return static_cast<std::size_t>(4 * v_power + u_power);
}

/// One parent point's local surface: a bicubic height field over the first
/// two frame axes, rotated into world space and anchored at the parent.
struct LocalPatch {
  Point3 origin = Point3::Zero();
  RotationMatrix rot;
  BicubicCoeffs coeffs{};
  double scale = 1.0;
};

/// Gram-Schmidt decoding of the 6D representation into the matrix with
/// columns [b1 b2 b3]. Throws DegenerateInput when a1 vanishes or a2 is
/// parallel to a1 (intermediate norms below 1e-12).
RotationMatrix decode_rotation(const Rotation6D& r6);

/// Monomials u^i v^j, i, j in 0..3, in BicubicCoeffs order.
BicubicEmbedding bicubic_embed(double u, double v);

double bicubic_eval(const BicubicCoeffs& c, double u, double v);

/// origin + R * (du, dv, phi(du, dv)) * scale, with (du, dv) in scale units.
Point3 patch_lift(const LocalPatch& p, double du, double dv);

/// Inverse of the rigid part of patch_lift: (u, v, w) of a world point in
/// the patch frame, in scale units.
Eigen::Vector3d patch_local(const LocalPatch& p, const Point3& x);

} // namespace surfup
