#pragma once

#include <cstdint>
#include <vector>

#include "surfup/mesh.hpp"

namespace surfup {

/// Closest point on triangle abc to p, handling the vertex, edge and face
/// Voronoi regions.
Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                 const Point3& c);

/// Squared distance from p to the nearest face, scanning every face.
double mesh_distance2_brute_force(const TriangleMesh& mesh, const Point3& p);

/// Axis-aligned bounding-volume hierarchy over the faces of a mesh. Meshes
/// below `brute_force_below` faces skip the tree and scan directly.
class MeshDistanceTree {
public:
  explicit MeshDistanceTree(const TriangleMesh& mesh, std::size_t brute_force_below = 200);

  double distance2(const Point3& p) const;
  double distance(const Point3& p) const;

private:
  struct Node {
    Eigen::Vector3d lo, hi;
    std::uint32_t begin, end;
    std::int32_t left = -1, right = -1;
  };
  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  const TriangleMesh* mesh_;
  std::vector<std::uint32_t> order_;
  std::vector<Eigen::Vector3d> centroids_;
  std::vector<Node> nodes_;
  bool brute_force_;
};

} // namespace surfup
