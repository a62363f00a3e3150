#pragma once

#include <cstdint>
#include <vector>

#include "surfup/geometry.hpp"

namespace surfup {

struct Neighbor {
  std::size_t index;
  double distance;
};

/// Static axis-aligned BSP (kd-tree) over a copy of a point cloud.
/// Results are exact and identical to a brute-force scan; equal distances
/// are ordered by point index.
class KnnIndex {
public:
  /// Throws EmptyCloud for an empty point list.
  explicit KnnIndex(std::span<const Point3> points, std::size_t leaf_size = 12);
  explicit KnnIndex(const PointCloud& cloud) : KnnIndex(cloud.points()) {}

  std::size_t size() const noexcept { return points_.size(); }
  const Point3& point(std::size_t i) const { return points_[i]; }

  /// The k nearest points, ascending by (distance, index). Throws KTooLarge
  /// when k > size() and InvalidConfig when k == 0.
  std::vector<Neighbor> knn(const Point3& q, std::size_t k) const;

  /// Closest point; ties go to the smaller index.
  Neighbor nearest(const Point3& q) const;

  /// Every point with distance <= radius, ascending by (distance, index).
  std::vector<Neighbor> within(const Point3& q, double radius) const;

private:
  struct Node {
    Eigen::Vector3d lo, hi; // bounds of the points below this node
    std::uint32_t begin, end;
    std::int32_t left = -1, right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  static double box_distance2(const Node& n, const Point3& q);

  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

inline KnnIndex build_index(const PointCloud& cloud) { return KnnIndex(cloud); }

/// Greedy farthest-point sampling starting from `seed_index`; each new pick
/// maximizes the distance to the picked set, ties go to the smaller index.
/// Throws MTooLarge when m > N and InvalidConfig for m == 0 or a bad seed.
std::vector<std::size_t> farthest_point_sample(std::span<const Point3> points,
                                               std::size_t m,
                                               std::size_t seed_index);

inline std::vector<std::size_t> farthest_point_sample(const PointCloud& cloud,
                                                      std::size_t m,
                                                      std::size_t seed_index) {
  return farthest_point_sample(cloud.points(), m, seed_index);
}

} // namespace surfup
