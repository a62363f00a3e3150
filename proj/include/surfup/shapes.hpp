#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "surfup/geometry.hpp"
#include "surfup/mesh.hpp"

namespace surfup::shapes {

/// Analytic test surfaces.
///   plane    z = 0 over [-1, 1]^2
///   sphere   unit sphere
///   cylinder radius 0.5 around z, |z| <= 1
///   saddle   z = (x^2 - y^2) / 2 over [-1, 1]^2
///   torus    major radius 0.7, minor radius 0.3, axis z
enum class Shape { plane, sphere, cylinder, saddle, torus };

std::string to_string(Shape s);
Shape parse_shape(const std::string& s);
const std::vector<Shape>& all_shapes();

/// n area-uniform random samples, deterministic per seed.
PointCloud sample(Shape s, std::size_t n, std::uint64_t seed);

/// Ground-truth triangulation. Open surfaces extend 0.5 beyond the sampled
/// domain so children near the border still measure their distance to the
/// surface rather than to its rim.
TriangleMesh ground_truth_mesh(Shape s);

/// Deterministic golden-angle lattice on the unit sphere:
/// z_i = 1 - (2i + 1) / n, azimuth_i = i * pi * (3 - sqrt(5)).
PointCloud fibonacci_sphere(std::size_t n);

/// Blue-noise sphere samples: farthest-point subset of `oversample * n`
/// uniform random points.
PointCloud poisson_disk_sphere(std::size_t n, std::uint64_t seed, std::size_t oversample = 16);

/// Regular icosahedron subdivided `level` times and projected to the unit
/// sphere.
TriangleMesh icosphere(int level);

} // namespace surfup::shapes
