#include "surfup/geometry.hpp"

#include <cmath>
#include <string>

#include "surfup/error.hpp"

namespace surfup {

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.empty())
    throw EmptyCloud();
  bbox_.min = bbox_.max = points_.front();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Point3& p = points_[i];
    if (!p.allFinite())
      throw DegenerateInput("non-finite coordinate at point " + std::to_string(i));
    bbox_.min = bbox_.min.cwiseMin(p);
    bbox_.max = bbox_.max.cwiseMax(p);
  }
}

namespace {
constexpr double kDegenerateNorm = 1e-12;
}

RotationMatrix decode_rotation(const Rotation6D& r6) {
  const double n1 = r6.a1.norm();
  if (!(n1 >= kDegenerateNorm))
    throw DegenerateInput("6D rotation: first vector is zero");
  const Eigen::Vector3d b1 = r6.a1 / n1;

  const Eigen::Vector3d ortho = r6.a2 - r6.a2.dot(b1) * b1;
  const double n2 = ortho.norm();
  if (!(n2 >= kDegenerateNorm))
    throw DegenerateInput("6D rotation: vectors are parallel");
  const Eigen::Vector3d b2 = ortho / n2;
  const Eigen::Vector3d b3 = b1.cross(b2);

  Eigen::Matrix3d m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b3;
  return RotationMatrix::unchecked(m);
}

BicubicEmbedding bicubic_embed(double u, double v) {
  BicubicEmbedding e{};
  double vj = 1.0;
  for (int j = 0; j < 4; ++j) {
    double ui = 1.0;
    for (int i = 0; i < 4; ++i) {
      e[coeff_index(i, j)] = ui * vj;
      ui *= u;
    }
    vj *= v;
  }
  return e;
}

double bicubic_eval(const BicubicCoeffs& c, double u, double v) {
  const BicubicEmbedding e = bicubic_embed(u, v);
  double w = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    w += c[i] * e[i];
  return w;
}

Point3 patch_lift(const LocalPatch& p, double du, double dv) {
  const Eigen::Vector3d local(du, dv, bicubic_eval(p.coeffs, du, dv));
  return p.origin + p.rot * (local * p.scale);
}

Eigen::Vector3d patch_local(const LocalPatch& p, const Point3& x) {
  return p.rot.matrix().transpose() * (x - p.origin) / p.scale;
}

} // namespace surfup
