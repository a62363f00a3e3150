#include "surfup/mesh_distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "surfup/error.hpp"

namespace surfup {

bool is_degenerate(const Point3& a, const Point3& b, const Point3& c) {
  const double longest = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(),
                                   (a - c).squaredNorm()});
  if (longest == 0.0)
    return true;
  return (b - a).cross(c - a).norm() <= 1e-12 * longest;
}

std::size_t drop_degenerate_faces(const std::vector<Point3>& vertices, std::vector<Face>& faces) {
  const auto before = faces.size();
  std::erase_if(faces, [&](const Face& f) {
    return is_degenerate(vertices[f[0]], vertices[f[1]], vertices[f[2]]);
  });
  return before - faces.size();
}

TriangleMesh::TriangleMesh(std::vector<Point3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (!vertices_[i].allFinite())
      throw DegenerateInput("mesh vertex " + std::to_string(i) + " is not finite");
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (std::uint32_t v : faces_[f])
      if (v >= vertices_.size())
        throw DegenerateInput("face " + std::to_string(f) + " references vertex " +
                              std::to_string(v) + " out of range");
    const auto [a, b, c] = triangle(f);
    if (is_degenerate(a, b, c))
      throw DegenerateInput("face " + std::to_string(f) + " has zero area");
  }
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                 const Point3& c) {
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0)
    return a;

  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3)
    return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0)
    return a + (d1 / (d1 - d3)) * ab;

  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6)
    return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0)
    return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

  // Face region: project onto the plane, which is exact for in-plane points.
  const Eigen::Vector3d n = ab.cross(ac);
  return p - n * (ap.dot(n) / n.squaredNorm());
}

namespace {

double face_distance2(const TriangleMesh& mesh, std::size_t f, const Point3& p) {
  const auto [a, b, c] = mesh.triangle(f);
  return (p - closest_point_on_triangle(p, a, b, c)).squaredNorm();
}

} // namespace

double mesh_distance2_brute_force(const TriangleMesh& mesh, const Point3& p) {
  if (mesh.empty())
    throw EmptyMesh();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.faces().size(); ++f)
    best = std::min(best, face_distance2(mesh, f, p));
  return best;
}

MeshDistanceTree::MeshDistanceTree(const TriangleMesh& mesh, std::size_t brute_force_below)
    : mesh_(&mesh), brute_force_(mesh.faces().size() < brute_force_below) {
  if (mesh.empty())
    throw EmptyMesh();
  if (brute_force_)
    return;
  const std::size_t nf = mesh.faces().size();
  order_.resize(nf);
  std::iota(order_.begin(), order_.end(), 0u);
  centroids_.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto [a, b, c] = mesh.triangle(f);
    centroids_[f] = (a + b + c) / 3.0;
  }
  nodes_.reserve(2 * nf);
  build(0, static_cast<std::uint32_t>(nf));
}

std::int32_t MeshDistanceTree::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  Eigen::Vector3d clo = node.lo, chi = node.hi;
  for (std::uint32_t i = begin; i < end; ++i) {
    for (const Point3& v : mesh_->triangle(order_[i])) {
      node.lo = node.lo.cwiseMin(v);
      node.hi = node.hi.cwiseMax(v);
    }
    clo = clo.cwiseMin(centroids_[order_[i]]);
    chi = chi.cwiseMax(centroids_[order_[i]]);
  }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= 4)
    return id;
  int axis = 0;
  (chi - clo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return centroids_[a][axis] < centroids_[b][axis];
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double MeshDistanceTree::distance2(const Point3& p) const {
  if (brute_force_)
    return mesh_distance2_brute_force(*mesh_, p);

  auto box_d2 = [&](const Node& n) {
    const Eigen::Vector3d d = (n.lo - p).cwiseMax(p - n.hi).cwiseMax(0.0);
    return d.squaredNorm();
  };
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](auto&& self, std::int32_t id) -> void {
    const Node& n = nodes_[id];
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i)
        best = std::min(best, face_distance2(*mesh_, order_[i], p));
      return;
    }
    const double dl = box_d2(nodes_[n.left]);
    const double dr = box_d2(nodes_[n.right]);
    const std::int32_t first = dl <= dr ? n.left : n.right;
    const std::int32_t second = dl <= dr ? n.right : n.left;
    if (std::min(dl, dr) < best)
      self(self, first);
    if (std::max(dl, dr) < best)
      self(self, second);
  };
  if (box_d2(nodes_[0]) < best)
    visit(visit, 0);
  return best;
}

double MeshDistanceTree::distance(const Point3& p) const { return std::sqrt(distance2(p)); }

} // namespace surfup
