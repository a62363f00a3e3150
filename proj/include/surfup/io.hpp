#pragma once

#include <filesystem>
#include <string>

#include "surfup/geometry.hpp"
#include "surfup/mesh.hpp"

namespace surfup::io {

enum class CloudFormat { xyz, ply_ascii, ply_binary_le };

std::string to_string(CloudFormat f);
/// "xyz", "ply", "ply_ascii", "ply_binary" / "ply_binary_le".
CloudFormat parse_cloud_format(const std::string& s);

/// Format implied by the file name: .ply -> binary PLY, anything else XYZ.
CloudFormat format_for_path(const std::filesystem::path& path);

/// XYZ (whitespace-separated x y z per line, '#' comments) or PLY, chosen by
/// the "ply" magic. PLY needs a vertex element with x, y, z properties;
/// other properties and elements are skipped. Throws ParseError,
/// UnsupportedFormat or IoError.
PointCloud read_cloud(const std::filesystem::path& path);

/// Same as read_cloud() for in-memory content.
PointCloud parse_cloud(const std::string& content);

/// Binary PLY stores doubles and round-trips exactly; text formats print 9
/// significant digits.
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format);
std::string serialize_cloud(const PointCloud& cloud, CloudFormat format);

struct MeshLoad {
  TriangleMesh mesh;
  std::size_t dropped_faces = 0; ///< zero-area faces removed while loading
};

/// OFF or PLY with a face element. Polygons are fan-triangulated.
MeshLoad read_mesh(const std::filesystem::path& path);
MeshLoad parse_mesh(const std::string& content);

/// ASCII OFF.
void write_mesh_off(const TriangleMesh& mesh, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace surfup::io
