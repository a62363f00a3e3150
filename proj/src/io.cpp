#include "surfup/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <optional>
#include <vector>

#include "surfup/error.hpp"

namespace surfup::io {

using Unit = ParseError::Unit;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw IoError("failed writing '" + path.string() + "'");
}

std::string to_string(CloudFormat f) {
  switch (f) {
  case CloudFormat::xyz:
    return "xyz";
  case CloudFormat::ply_ascii:
    return "ply_ascii";
  case CloudFormat::ply_binary_le:
    return "ply_binary_le";
  }
  return "?";
}

CloudFormat parse_cloud_format(const std::string& s) {
  if (s == "xyz")
    return CloudFormat::xyz;
  if (s == "ply_ascii")
    return CloudFormat::ply_ascii;
  if (s == "ply" || s == "ply_binary" || s == "ply_binary_le")
    return CloudFormat::ply_binary_le;
  throw UnsupportedFormat("unknown cloud format '" + s + "'");
}

CloudFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".ply" ? CloudFormat::ply_binary_le : CloudFormat::xyz;
}

namespace {

// ---------------------------------------------------------------- text lines

class LineCursor {
public:
  LineCursor(const std::string& s, std::size_t pos, std::size_t line) : s_(s), pos_(pos), line_(line) {}

  /// Next line with content other than whitespace and comments; nullopt at end.
  std::optional<std::string_view> next(bool hash_comments) {
    while (pos_ < s_.size()) {
      const std::size_t eol = s_.find('\n', pos_);
      const std::size_t end = eol == std::string::npos ? s_.size() : eol;
      std::string_view l(s_.data() + pos_, end - pos_);
      pos_ = eol == std::string::npos ? s_.size() : eol + 1;
      ++line_;
      if (hash_comments) {
        if (const auto h = l.find('#'); h != std::string_view::npos)
          l = l.substr(0, h);
      }
      if (l.find_first_not_of(" \t\r\f\v") != std::string_view::npos)
        return l;
    }
    return std::nullopt;
  }

  std::size_t line() const { return line_; }

private:
  const std::string& s_;
  std::size_t pos_;
  std::size_t line_;
};

std::vector<std::string_view> tokenize(std::string_view l) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < l.size()) {
    while (i < l.size() && std::isspace(static_cast<unsigned char>(l[i])))
      ++i;
    std::size_t j = i;
    while (j < l.size() && !std::isspace(static_cast<unsigned char>(l[j])))
      ++j;
    if (j > i)
      out.push_back(l.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_real(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* b = tok.data();
  if (!tok.empty() && tok[0] == '+')
    ++b;
  const auto res = std::from_chars(b, tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError("invalid number '" + std::string(tok) + "'", line, Unit::line);
  return v;
}

long long parse_integer(std::string_view tok, std::size_t line) {
  long long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError("invalid integer '" + std::string(tok) + "'", line, Unit::line);
  return v;
}

Point3 checked_point(double x, double y, double z, std::size_t loc, Unit unit) {
  const Point3 p(x, y, z);
  if (!p.allFinite())
    throw ParseError("non-finite coordinate", loc, unit);
  return p;
}

PointCloud parse_xyz(const std::string& content) {
  LineCursor cur(content, 0, 0);
  std::vector<Point3> pts;
  while (auto l = cur.next(true)) {
    const auto tok = tokenize(*l);
    if (tok.size() != 3)
      throw ParseError("expected 3 coordinates, found " + std::to_string(tok.size()), cur.line(),
                       Unit::line);
    pts.push_back(checked_point(parse_real(tok[0], cur.line()), parse_real(tok[1], cur.line()),
                                parse_real(tok[2], cur.line()), cur.line(), Unit::line));
  }
  if (pts.empty())
    throw ParseError("no points in XYZ content", cur.line(), Unit::line);
  return PointCloud(std::move(pts));
}

// --------------------------------------------------------------------- PLY

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view s) {
  if (s == "char" || s == "int8") return PlyType::i8;
  if (s == "uchar" || s == "uint8") return PlyType::u8;
  if (s == "short" || s == "int16") return PlyType::i16;
  if (s == "ushort" || s == "uint16") return PlyType::u16;
  if (s == "int" || s == "int32") return PlyType::i32;
  if (s == "uint" || s == "uint32") return PlyType::u32;
  if (s == "float" || s == "float32") return PlyType::f32;
  if (s == "double" || s == "float64") return PlyType::f64;
  return std::nullopt;
}

std::size_t type_size(PlyType t) {
  switch (t) {
  case PlyType::i8: case PlyType::u8: return 1;
  case PlyType::i16: case PlyType::u16: return 2;
  case PlyType::i32: case PlyType::u32: case PlyType::f32: return 4;
  case PlyType::f64: return 8;
  }
  return 0;
}

bool is_integral(PlyType t) { return t != PlyType::f32 && t != PlyType::f64; }

struct PlyProperty {
  std::string name;
  PlyType type;
  std::optional<PlyType> list_count; // set for list properties
};

struct PlyElement {
  std::string name;
  std::size_t count;
  std::vector<PlyProperty> props;

  int find(std::string_view n) const {
    for (std::size_t i = 0; i < props.size(); ++i)
      if (props[i].name == n)
        return static_cast<int>(i);
    return -1;
  }
};

struct PlyHeader {
  bool binary = false;
  std::vector<PlyElement> elements;
  std::size_t data_offset = 0;
  std::size_t header_lines = 0;
};

bool has_ply_magic(const std::string& s) {
  return s.size() >= 3 && s.compare(0, 3, "ply") == 0 &&
         (s.size() == 3 || s[3] == '\n' || s[3] == '\r');
}

PlyHeader parse_ply_header(const std::string& s) {
  PlyHeader h;
  std::size_t pos = 0, line = 0;
  bool saw_format = false;
  while (true) {
    const std::size_t eol = s.find('\n', pos);
    if (eol == std::string::npos)
      throw ParseError("PLY header has no end_header", line + 1, Unit::line);
    std::string_view l(s.data() + pos, eol - pos);
    pos = eol + 1;
    ++line;
    if (!l.empty() && l.back() == '\r')
      l.remove_suffix(1);
    const auto tok = tokenize(l);
    if (line == 1) {
      if (tok.size() != 1 || tok[0] != "ply")
        throw ParseError("missing 'ply' magic", line, Unit::line);
      continue;
    }
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info")
      continue;
    if (tok[0] == "format") {
      if (tok.size() < 2)
        throw ParseError("malformed format line", line, Unit::line);
      if (tok[1] == "ascii")
        h.binary = false;
      else if (tok[1] == "binary_little_endian")
        h.binary = true;
      else
        throw UnsupportedFormat("PLY encoding '" + std::string(tok[1]) + "' is not supported");
      saw_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3)
        throw ParseError("malformed element line", line, Unit::line);
      const long long n = parse_integer(tok[2], line);
      if (n < 0)
        throw ParseError("negative element count", line, Unit::line);
      h.elements.push_back({std::string(tok[1]), static_cast<std::size_t>(n), {}});
    } else if (tok[0] == "property") {
      if (h.elements.empty())
        throw ParseError("property before any element", line, Unit::line);
      PlyProperty p;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = ply_type(tok[2]), it = ply_type(tok[3]);
        if (!ct || !it || !is_integral(*ct))
          throw ParseError("bad list property types", line, Unit::line);
        p = {std::string(tok[4]), *it, *ct};
      } else if (tok.size() == 3) {
        const auto t = ply_type(tok[1]);
        if (!t)
          throw ParseError("unknown property type '" + std::string(tok[1]) + "'", line, Unit::line);
        p = {std::string(tok[2]), *t, std::nullopt};
      } else {
        throw ParseError("malformed property line", line, Unit::line);
      }
      h.elements.back().props.push_back(std::move(p));
    } else if (tok[0] == "end_header") {
      break;
    } else {
      throw ParseError("unexpected header keyword '" + std::string(tok[0]) + "'", line, Unit::line);
    }
  }
  if (!saw_format)
    throw ParseError("PLY header lacks a format line", line, Unit::line);
  h.data_offset = pos;
  h.header_lines = line;
  return h;
}

// Sequential access to the body; one call to begin_item() per element item.
class PlyBody {
public:
  PlyBody(const std::string& s, const PlyHeader& h)
      : s_(s), binary_(h.binary), pos_(h.data_offset), lines_(s, h.data_offset, h.header_lines) {}

  void begin_item() {
    if (binary_)
      return;
    auto l = lines_.next(false);
    if (!l)
      throw ParseError("unexpected end of data: fewer items than declared", lines_.line() + 1,
                       Unit::line);
    tokens_ = tokenize(*l);
    tok_pos_ = 0;
  }

  void end_item() {
    if (!binary_ && tok_pos_ != tokens_.size())
      throw ParseError("extra values on line", lines_.line(), Unit::line);
  }

  double scalar(PlyType t) {
    if (!binary_) {
      if (tok_pos_ >= tokens_.size())
        throw ParseError("too few values on line", lines_.line(), Unit::line);
      const std::string_view tok = tokens_[tok_pos_++];
      return is_integral(t) ? static_cast<double>(parse_integer(tok, lines_.line()))
                            : parse_real(tok, lines_.line());
    }
    const std::size_t n = type_size(t);
    if (pos_ + n > s_.size())
      throw ParseError("unexpected end of binary data: fewer items than declared", pos_, Unit::byte);
    unsigned char b[8];
    std::memcpy(b, s_.data() + pos_, n);
    if constexpr (std::endian::native == std::endian::big)
      std::reverse(b, b + n);
    pos_ += n;
    switch (t) {
    case PlyType::i8: { std::int8_t v; std::memcpy(&v, b, 1); return v; }
    case PlyType::u8: { std::uint8_t v; std::memcpy(&v, b, 1); return v; }
    case PlyType::i16: { std::int16_t v; std::memcpy(&v, b, 2); return v; }
    case PlyType::u16: { std::uint16_t v; std::memcpy(&v, b, 2); return v; }
    case PlyType::i32: { std::int32_t v; std::memcpy(&v, b, 4); return v; }
    case PlyType::u32: { std::uint32_t v; std::memcpy(&v, b, 4); return v; }
    case PlyType::f32: { float v; std::memcpy(&v, b, 4); return v; }
    case PlyType::f64: { double v; std::memcpy(&v, b, 8); return v; }
    }
    return 0.0;
  }

  void finish() {
    if (binary_) {
      if (pos_ != s_.size())
        throw ParseError("trailing data after declared elements", pos_, Unit::byte);
    } else if (lines_.next(false)) {
      throw ParseError("more items than declared", lines_.line(), Unit::line);
    }
  }

  std::size_t location() const { return binary_ ? pos_ : lines_.line(); }
  Unit unit() const { return binary_ ? Unit::byte : Unit::line; }

private:
  const std::string& s_;
  bool binary_;
  std::size_t pos_;
  LineCursor lines_;
  std::vector<std::string_view> tokens_;
  std::size_t tok_pos_ = 0;
};

struct PlyData {
  std::vector<Point3> vertices;
  std::vector<std::vector<long long>> faces;
  std::vector<std::size_t> face_locations;
  Unit unit = Unit::line;
  bool has_faces = false;
};

PlyData read_ply(const std::string& s) {
  const PlyHeader h = parse_ply_header(s);
  PlyBody body(s, h);
  PlyData out;
  bool saw_vertex = false;
  for (const PlyElement& e : h.elements) {
    int ix = -1, iy = -1, iz = -1, iface = -1;
    if (e.name == "vertex") {
      ix = e.find("x");
      iy = e.find("y");
      iz = e.find("z");
      if (ix < 0 || iy < 0 || iz < 0)
        throw ParseError("vertex element lacks x, y or z", h.header_lines, Unit::line);
      for (int i : {ix, iy, iz})
        if (e.props[static_cast<std::size_t>(i)].list_count)
          throw ParseError("vertex coordinate declared as list", h.header_lines, Unit::line);
      saw_vertex = true;
      out.vertices.reserve(e.count);
    } else if (e.name == "face") {
      iface = e.find("vertex_indices");
      if (iface < 0)
        iface = e.find("vertex_index");
      out.has_faces = iface >= 0;
    }
    std::vector<double> vals(e.props.size());
    for (std::size_t item = 0; item < e.count; ++item) {
      body.begin_item();
      std::vector<long long> face;
      for (std::size_t pi = 0; pi < e.props.size(); ++pi) {
        const PlyProperty& p = e.props[pi];
        if (p.list_count) {
          const double n = body.scalar(*p.list_count);
          if (n < 0)
            throw ParseError("negative list length", body.location(), body.unit());
          for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
            const double v = body.scalar(p.type);
            if (static_cast<int>(pi) == iface)
              face.push_back(static_cast<long long>(v));
          }
        } else {
          vals[pi] = body.scalar(p.type);
        }
      }
      body.end_item();
      if (ix >= 0)
        out.vertices.push_back(checked_point(vals[static_cast<std::size_t>(ix)],
                                             vals[static_cast<std::size_t>(iy)],
                                             vals[static_cast<std::size_t>(iz)], body.location(),
                                             body.unit()));
      if (iface >= 0) {
        out.faces.push_back(std::move(face));
        out.face_locations.push_back(body.location());
      }
    }
  }
  body.finish();
  out.unit = body.unit();
  if (!saw_vertex)
    throw ParseError("PLY has no vertex element", h.header_lines, Unit::line);
  return out;
}

// --------------------------------------------------------------------- OFF

struct OffData {
  std::vector<Point3> vertices;
  std::vector<std::vector<long long>> faces;
  std::vector<std::size_t> face_lines;
};

OffData read_off(const std::string& s) {
  LineCursor cur(s, 0, 0);
  auto first = cur.next(true);
  if (!first)
    throw ParseError("empty OFF file", 1, Unit::line);
  auto tok = tokenize(*first);
  if (tok.empty() || tok[0] != "OFF")
    throw ParseError("missing OFF magic", cur.line(), Unit::line);
  tok.erase(tok.begin());
  if (tok.empty()) {
    auto l = cur.next(true);
    if (!l)
      throw ParseError("missing OFF counts", cur.line() + 1, Unit::line);
    tok = tokenize(*l);
  }
  if (tok.size() < 2)
    throw ParseError("malformed OFF counts", cur.line(), Unit::line);
  const long long nv = parse_integer(tok[0], cur.line());
  const long long nf = parse_integer(tok[1], cur.line());
  if (nv < 0 || nf < 0)
    throw ParseError("negative OFF counts", cur.line(), Unit::line);

  OffData out;
  out.vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    auto l = cur.next(true);
    if (!l)
      throw ParseError("fewer vertices than declared", cur.line() + 1, Unit::line);
    const auto t = tokenize(*l);
    if (t.size() < 3)
      throw ParseError("vertex needs 3 coordinates", cur.line(), Unit::line);
    out.vertices.push_back(checked_point(parse_real(t[0], cur.line()), parse_real(t[1], cur.line()),
                                         parse_real(t[2], cur.line()), cur.line(), Unit::line));
  }
  for (long long f = 0; f < nf; ++f) {
    auto l = cur.next(true);
    if (!l)
      throw ParseError("fewer faces than declared", cur.line() + 1, Unit::line);
    const auto t = tokenize(*l);
    if (t.empty())
      throw ParseError("empty face line", cur.line(), Unit::line);
    const long long n = parse_integer(t[0], cur.line());
    if (n < 0 || t.size() < static_cast<std::size_t>(n) + 1)
      throw ParseError("face has fewer indices than its count", cur.line(), Unit::line);
    std::vector<long long> face;
    for (long long k = 1; k <= n; ++k)
      face.push_back(parse_integer(t[static_cast<std::size_t>(k)], cur.line()));
    // Remaining tokens are per-face colors.
    out.faces.push_back(std::move(face));
    out.face_lines.push_back(cur.line());
  }
  return out;
}

MeshLoad build_mesh(std::vector<Point3> vertices, const std::vector<std::vector<long long>>& polys,
                    const std::vector<std::size_t>& locations, Unit unit) {
  std::vector<Face> faces;
  for (std::size_t f = 0; f < polys.size(); ++f) {
    const auto& poly = polys[f];
    for (long long v : poly)
      if (v < 0 || static_cast<std::size_t>(v) >= vertices.size())
        throw ParseError("face " + std::to_string(f) + " index " + std::to_string(v) +
                             " out of range",
                         locations[f], unit);
    for (std::size_t k = 1; k + 1 < poly.size(); ++k)
      faces.push_back({static_cast<std::uint32_t>(poly[0]), static_cast<std::uint32_t>(poly[k]),
                       static_cast<std::uint32_t>(poly[k + 1])});
  }
  MeshLoad out;
  out.dropped_faces = drop_degenerate_faces(vertices, faces);
  out.mesh = TriangleMesh(std::move(vertices), std::move(faces));
  return out;
}

void append_real(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.9g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

void append_le_double(std::string& out, double v) {
  unsigned char b[8];
  std::memcpy(b, &v, 8);
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(b, b + 8);
  out.append(reinterpret_cast<const char*>(b), 8);
}

} // namespace

PointCloud parse_cloud(const std::string& content) {
  if (!has_ply_magic(content))
    return parse_xyz(content);
  PlyData d = read_ply(content);
  if (d.vertices.empty())
    throw ParseError("PLY declares no vertices", 0, Unit::line);
  return PointCloud(std::move(d.vertices));
}

PointCloud read_cloud(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const auto ext = path.extension().string();
  if (!has_ply_magic(content) && ext != ".xyz" && ext != ".txt" && ext != ".pts" && !ext.empty())
    throw UnsupportedFormat("cannot infer point cloud format of '" + path.string() + "'");
  return parse_cloud(content);
}

std::string serialize_cloud(const PointCloud& cloud, CloudFormat format) {
  std::string out;
  if (format == CloudFormat::xyz) {
    out.reserve(cloud.size() * 48);
    for (const Point3& p : cloud) {
      append_real(out, p.x());
      out += ' ';
      append_real(out, p.y());
      out += ' ';
      append_real(out, p.z());
      out += '\n';
    }
    return out;
  }
  const bool binary = format == CloudFormat::ply_binary_le;
  out += "ply\nformat ";
  out += binary ? "binary_little_endian" : "ascii";
  out += " 1.0\nelement vertex " + std::to_string(cloud.size()) + "\n";
  const char* type = "double";
  for (const char* axis : {"x", "y", "z"})
    out += std::string("property ") + type + " " + axis + "\n";
  out += "end_header\n";
  for (const Point3& p : cloud) {
    if (binary) {
      for (int a = 0; a < 3; ++a)
        append_le_double(out, p[a]);
    } else {
      append_real(out, p.x());
      out += ' ';
      append_real(out, p.y());
      out += ' ';
      append_real(out, p.z());
      out += '\n';
    }
  }
  return out;
}

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format) {
  write_file(path, serialize_cloud(cloud, format));
}

MeshLoad parse_mesh(const std::string& content) {
  if (has_ply_magic(content)) {
    PlyData d = read_ply(content);
    if (!d.has_faces)
      throw ParseError("PLY has no face element with vertex indices", 0, Unit::line);
    return build_mesh(std::move(d.vertices), d.faces, d.face_locations, d.unit);
  }
  OffData d = read_off(content);
  return build_mesh(std::move(d.vertices), d.faces, d.face_lines, Unit::line);
}

MeshLoad read_mesh(const std::filesystem::path& path) { return parse_mesh(read_file(path)); }

void write_mesh_off(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::string out = "OFF\n" + std::to_string(mesh.vertices().size()) + " " +
                    std::to_string(mesh.faces().size()) + " 0\n";
  for (const Point3& v : mesh.vertices()) {
    char buf[96];
    const int n = std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out.append(buf, static_cast<std::size_t>(n));
  }
  for (const Face& f : mesh.faces())
    out += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  write_file(path, out);
}

} // namespace surfup::io
