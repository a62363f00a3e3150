#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "surfup/error.hpp"
#include "surfup/io.hpp"

using namespace surfup;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "surfup_test_io";
  fs::create_directories(dir);
  return dir / name;
}

template <class T>
void append_le(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

std::size_t parse_error_location(const std::string& content, bool mesh = false) {
  try {
    if (mesh)
      io::parse_mesh(content);
    else
      io::parse_cloud(content);
  } catch (const ParseError& e) {
    return e.location();
  }
  FAIL("expected a ParseError");
  return 0;
}

} // namespace

TEST_CASE("xyz parsing") {
  const PointCloud c = io::parse_cloud("0 0 0\n1 2 3\n");
  REQUIRE(c.size() == 2);
  CHECK(c[0] == Point3(0, 0, 0));
  CHECK(c[1] == Point3(1, 2, 3));

  const PointCloud commented = io::parse_cloud("# header\n  1.5\t-2e3 4 # tail\n\n7 8 9");
  REQUIRE(commented.size() == 2);
  CHECK(commented[0] == Point3(1.5, -2000, 4));

  CHECK(parse_error_location("0 0 0\n1 2\n") == 2);
  CHECK(parse_error_location("0 0 0 0\n") == 1);
  CHECK(parse_error_location("0 0 x\n") == 1);
  CHECK(parse_error_location("0 0 0\nnan 0 0\n") == 2);
  CHECK(parse_error_location("0 0 0\n0 inf 0\n") == 2);
  CHECK_THROWS_AS(io::parse_cloud("# nothing\n"), ParseError);
}

TEST_CASE("ascii ply parsing") {
  const std::string ply = "ply\nformat ascii 1.0\ncomment test\nelement vertex 3\n"
                          "property float x\nproperty float y\nproperty float z\n"
                          "property uchar red\nend_header\n"
                          "0 0 0 255\n1 0 0 10\n0 1 2 3\n";
  const PointCloud c = io::parse_cloud(ply);
  REQUIRE(c.size() == 3);
  CHECK(c[2] == Point3(0, 1, 2));

  const std::string short_ply = "ply\nformat ascii 1.0\nelement vertex 4\n"
                                "property float x\nproperty float y\nproperty float z\n"
                                "end_header\n0 0 0\n1 0 0\n0 1 0\n";
  CHECK_THROWS_AS(io::parse_cloud(short_ply), ParseError);

  const std::string reordered = "ply\nformat ascii 1.0\nelement vertex 1\n"
                                "property double z\nproperty double nx\nproperty double x\n"
                                "property double y\nend_header\n3 9 1 2\n";
  CHECK(io::parse_cloud(reordered)[0] == Point3(1, 2, 3));

  const std::string no_z = "ply\nformat ascii 1.0\nelement vertex 1\n"
                           "property float x\nproperty float y\nend_header\n0 0\n";
  CHECK_THROWS_AS(io::parse_cloud(no_z), ParseError);

  const std::string big_endian = "ply\nformat binary_big_endian 1.0\nelement vertex 1\n"
                                 "property float x\nproperty float y\nproperty float z\n"
                                 "end_header\n";
  CHECK_THROWS_AS(io::parse_cloud(big_endian), UnsupportedFormat);
}

TEST_CASE("binary ply with mixed property types") {
  std::string ply = "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
                    "property float x\nproperty uchar flag\nproperty double y\n"
                    "property float z\nelement face 0\n"
                    "property list uchar int vertex_indices\nend_header\n";
  append_le(ply, 1.5f);
  append_le(ply, std::uint8_t{7});
  append_le(ply, -2.25);
  append_le(ply, 3.0f);
  append_le(ply, 4.0f);
  append_le(ply, std::uint8_t{0});
  append_le(ply, 5.0);
  append_le(ply, 6.0f);
  const PointCloud c = io::parse_cloud(ply);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == Point3(1.5, -2.25, 3.0));
  CHECK(c[1] == Point3(4, 5, 6));

  CHECK_THROWS_AS(io::parse_cloud(ply.substr(0, ply.size() - 3)), ParseError);

  std::string nan_ply = "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
                        "property double x\nproperty double y\nproperty double z\nend_header\n";
  append_le(nan_ply, 0.0);
  append_le(nan_ply, std::numeric_limits<double>::quiet_NaN());
  append_le(nan_ply, 0.0);
  CHECK_THROWS_AS(io::parse_cloud(nan_ply), ParseError);
}

TEST_CASE("cloud round trips") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    auto pts = oracle::random_points(rng, 1 + static_cast<std::size_t>(t) * 37, -1e3, 1e3);
    pts[0] = Point3(std::nextafter(0.1, 1.0), -1e-300, 5e-324);
    const PointCloud c(pts);

    const fs::path bin = scratch("round.ply");
    io::write_cloud(c, bin, io::CloudFormat::ply_binary_le);
    CHECK(io::read_cloud(bin) == c);

    for (io::CloudFormat f : {io::CloudFormat::xyz, io::CloudFormat::ply_ascii}) {
      const PointCloud back = io::parse_cloud(io::serialize_cloud(c, f));
      REQUIRE(back.size() == c.size());
      for (std::size_t i = 0; i < c.size(); ++i)
        REQUIRE((back[i] - c[i]).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, c[i].norm()));
    }
  }
  // Unit-range coordinates meet the absolute bound directly.
  const PointCloud unit(oracle::random_points(rng, 500));
  const PointCloud back = io::parse_cloud(io::serialize_cloud(unit, io::CloudFormat::xyz));
  for (std::size_t i = 0; i < unit.size(); ++i)
    REQUIRE((back[i] - unit[i]).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("file errors") {
  CHECK_THROWS_AS(io::read_cloud(scratch("does_not_exist.xyz")), IoError);
  const PointCloud c({Point3(1, 2, 3)});
  CHECK_THROWS_AS(io::write_cloud(c, scratch("missing_dir") / "x" / "c.xyz", io::CloudFormat::xyz),
                  IoError);
}

TEST_CASE("format names") {
  CHECK(io::format_for_path("a/b.PLY") == io::CloudFormat::ply_binary_le);
  CHECK(io::format_for_path("a/b.xyz") == io::CloudFormat::xyz);
  CHECK(io::parse_cloud_format("ply_ascii") == io::CloudFormat::ply_ascii);
  CHECK_THROWS_AS(io::parse_cloud_format("obj"), UnsupportedFormat);
}

TEST_CASE("off meshes") {
  const std::string tet = "OFF\n# tetrahedron\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
                          "3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";
  const io::MeshLoad m = io::parse_mesh(tet);
  CHECK(m.mesh.faces().size() == 4);
  CHECK(m.mesh.vertices().size() == 4);
  CHECK(m.dropped_faces == 0);

  const std::string quad = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
  const io::MeshLoad q = io::parse_mesh(quad);
  REQUIRE(q.mesh.faces().size() == 2);
  CHECK(q.mesh.faces()[0] == Face{0, 1, 2});
  CHECK(q.mesh.faces()[1] == Face{0, 2, 3});

  const std::string bad = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n";
  CHECK(parse_error_location(bad, true) == 6);

  const std::string degenerate = "OFF\n4 2 0\n0 0 0\n1 0 0\n2 0 0\n0 1 0\n3 0 1 2\n3 0 1 3\n";
  const io::MeshLoad d = io::parse_mesh(degenerate);
  CHECK(d.dropped_faces == 1);
  CHECK(d.mesh.faces().size() == 1);

  const fs::path path = scratch("tet.off");
  io::write_mesh_off(m.mesh, path);
  const io::MeshLoad back = io::read_mesh(path);
  CHECK(back.mesh.vertices() == m.mesh.vertices());
  CHECK(back.mesh.faces() == m.mesh.faces());
}

TEST_CASE("ply meshes") {
  const std::string ply = "ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\n"
                          "property float y\nproperty float z\nelement face 1\n"
                          "property list uchar int vertex_indices\nend_header\n"
                          "0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
  const io::MeshLoad m = io::parse_mesh(ply);
  CHECK(m.mesh.faces().size() == 2);

  std::string bin = "ply\nformat binary_little_endian 1.0\nelement vertex 3\n"
                    "property float x\nproperty float y\nproperty float z\nelement face 1\n"
                    "property list uchar uint vertex_indices\nend_header\n";
  for (float v : {0.f, 0.f, 0.f, 1.f, 0.f, 0.f, 0.f, 1.f, 0.f})
    append_le(bin, v);
  append_le(bin, std::uint8_t{3});
  for (std::uint32_t i : {0u, 1u, 7u})
    append_le(bin, i);
  CHECK_THROWS_AS(io::parse_mesh(bin), ParseError);
}
