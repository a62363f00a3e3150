#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "surfup/geometry.hpp"

namespace surfup {

using Face = std::array<std::uint32_t, 3>;

/// Triangle soup with validated indices and no zero-area faces.
class TriangleMesh {
public:
  TriangleMesh() = default;

  /// Throws DegenerateInput for out-of-range indices, non-finite vertices or
  /// a zero-area face. Use drop_degenerate_faces() first to filter.
  TriangleMesh(std::vector<Point3> vertices, std::vector<Face> faces);

  const std::vector<Point3>& vertices() const noexcept { return vertices_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  bool empty() const noexcept { return faces_.empty(); }

  std::array<Point3, 3> triangle(std::size_t f) const {
    const Face& t = faces_[f];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
  }

private:
  std::vector<Point3> vertices_;
  std::vector<Face> faces_;
};

/// True when the triangle has zero area (collinear or repeated corners).
bool is_degenerate(const Point3& a, const Point3& b, const Point3& c);

/// Removes zero-area faces in place and returns how many were removed.
/// Indices must already be in range.
std::size_t drop_degenerate_faces(const std::vector<Point3>& vertices, std::vector<Face>& faces);

} // namespace surfup
