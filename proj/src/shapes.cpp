#include "surfup/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "surfup/error.hpp"
#include "surfup/kdtree.hpp"

namespace surfup::shapes {

using std::numbers::pi;

namespace {

constexpr double kCylinderRadius = 0.5;
constexpr double kTorusMajor = 0.7;
constexpr double kTorusMinor = 0.3;
constexpr double kMargin = 0.5;

double saddle_height(double x, double y) { return 0.5 * (x * x - y * y); }

// Regular grid over a parameter rectangle; `wrap_u` joins the last column to
// the first.
TriangleMesh grid_mesh(std::size_t nu, std::size_t nv, bool wrap_u, bool wrap_v,
                       const auto& position) {
  const std::size_t cols = wrap_u ? nu : nu + 1;
  const std::size_t rows = wrap_v ? nv : nv + 1;
  std::vector<Point3> verts;
  verts.reserve(cols * rows);
  for (std::size_t j = 0; j < rows; ++j)
    for (std::size_t i = 0; i < cols; ++i)
      verts.push_back(position(static_cast<double>(i) / static_cast<double>(nu),
                               static_cast<double>(j) / static_cast<double>(nv)));
  auto id = [&](std::size_t i, std::size_t j) {
    return static_cast<std::uint32_t>((j % rows) * cols + (i % cols));
  };
  std::vector<Face> faces;
  faces.reserve(2 * nu * nv);
  for (std::size_t j = 0; j < nv; ++j)
    for (std::size_t i = 0; i < nu; ++i) {
      faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return TriangleMesh(std::move(verts), std::move(faces));
}

} // namespace

std::string to_string(Shape s) {
  switch (s) {
  case Shape::plane: return "plane";
  case Shape::sphere: return "sphere";
  case Shape::cylinder: return "cylinder";
  case Shape::saddle: return "saddle";
  case Shape::torus: return "torus";
  }
  return "?";
}

Shape parse_shape(const std::string& s) {
  for (Shape sh : all_shapes())
    if (to_string(sh) == s)
      return sh;
  throw InvalidConfig("unknown shape '" + s + "'");
}

const std::vector<Shape>& all_shapes() {
  static const std::vector<Shape> shapes{Shape::plane, Shape::sphere, Shape::cylinder,
                                         Shape::saddle, Shape::torus};
  return shapes;
}

PointCloud sample(Shape s, std::size_t n, std::uint64_t seed) {
  if (n == 0)
    throw EmptyCloud();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Point3> pts;
  pts.reserve(n);
  while (pts.size() < n) {
    switch (s) {
    case Shape::plane:
      pts.emplace_back(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0, 0.0);
      break;
    case Shape::sphere: {
      Point3 g(gauss(rng), gauss(rng), gauss(rng));
      const double len = g.norm();
      if (len > 1e-12)
        pts.push_back(g / len);
      break;
    }
    case Shape::cylinder: {
      const double a = 2.0 * pi * unit(rng);
      pts.emplace_back(kCylinderRadius * std::cos(a), kCylinderRadius * std::sin(a),
                       2.0 * unit(rng) - 1.0);
      break;
    }
    case Shape::saddle: {
      // Rejection on the area element sqrt(1 + x^2 + y^2), maximal at corners.
      const double x = 2.0 * unit(rng) - 1.0, y = 2.0 * unit(rng) - 1.0;
      if (unit(rng) * std::sqrt(3.0) <= std::sqrt(1.0 + x * x + y * y))
        pts.emplace_back(x, y, saddle_height(x, y));
      break;
    }
    case Shape::torus: {
      const double u = 2.0 * pi * unit(rng), v = 2.0 * pi * unit(rng);
      const double ring = kTorusMajor + kTorusMinor * std::cos(v);
      if (unit(rng) * (kTorusMajor + kTorusMinor) <= ring)
        pts.emplace_back(ring * std::cos(u), ring * std::sin(u), kTorusMinor * std::sin(v));
      break;
    }
    }
  }
  return PointCloud(std::move(pts));
}

TriangleMesh icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Point3> v{{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                        {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (Point3& p : v)
    p.normalize();
  std::vector<Face> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mids;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      if (auto it = mids.find(key); it != mids.end())
        return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const auto id = static_cast<std::uint32_t>(v.size() - 1);
      mids.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& tri : f) {
      const std::uint32_t ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]),
                          ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh ground_truth_mesh(Shape s) {
  switch (s) {
  case Shape::plane: {
    const double e = 1.0 + kMargin;
    return grid_mesh(8, 8, false, false, [&](double a, double b) {
      return Point3(-e + 2.0 * e * a, -e + 2.0 * e * b, 0.0);
    });
  }
  case Shape::sphere:
    return icosphere(6);
  case Shape::cylinder: {
    const double h = 1.0 + kMargin;
    return grid_mesh(512, 24, true, false, [&](double a, double b) {
      return Point3(kCylinderRadius * std::cos(2 * pi * a), kCylinderRadius * std::sin(2 * pi * a),
                    -h + 2.0 * h * b);
    });
  }
  case Shape::saddle: {
    const double e = 1.0 + kMargin;
    return grid_mesh(300, 300, false, false, [&](double a, double b) {
      const double x = -e + 2.0 * e * a, y = -e + 2.0 * e * b;
      return Point3(x, y, saddle_height(x, y));
    });
  }
  case Shape::torus:
    return grid_mesh(512, 160, true, true, [&](double a, double b) {
      const double ring = kTorusMajor + kTorusMinor * std::cos(2 * pi * b);
      return Point3(ring * std::cos(2 * pi * a), ring * std::sin(2 * pi * a),
                    kTorusMinor * std::sin(2 * pi * b));
    });
  }
  throw InvalidConfig("unknown shape");
}

PointCloud fibonacci_sphere(std::size_t n) {
  if (n == 0)
    throw EmptyCloud();
  std::vector<Point3> pts;
  pts.reserve(n);
  const double golden = pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = static_cast<double>(i) * golden;
    pts.emplace_back(r * std::cos(a), r * std::sin(a), z);
  }
  return PointCloud(std::move(pts));
}

PointCloud poisson_disk_sphere(std::size_t n, std::uint64_t seed, std::size_t oversample) {
  const PointCloud dense = sample(Shape::sphere, n * std::max<std::size_t>(1, oversample), seed);
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i : farthest_point_sample(dense, n, 0))
    pts.push_back(dense[i]);
  return PointCloud(std::move(pts));
}

} // namespace surfup::shapes
