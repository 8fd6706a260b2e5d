#include "heatgeo/mesh.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace heatgeo {

namespace {

TriangleMesh build_mesh(const std::vector<Eigen::Vector3d>& points,
                        const std::vector<std::array<int, 3>>& triangles) {
  Points P(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) P.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  Faces F(static_cast<Eigen::Index>(triangles.size()), 3);
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    for (int k = 0; k < 3; ++k) F(static_cast<Eigen::Index>(i), k) = triangles[i][k];
  }
  return TriangleMesh(std::move(P), std::move(F));
}

void fan_triangulate(const std::vector<int>& polygon, std::vector<std::array<int, 3>>& out) {
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
    out.push_back({polygon[0], polygon[k], polygon[k + 1]});
  }
}

bool parse_double(std::string_view token, double& value) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

bool parse_long(std::string_view token, long& value) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

// --- PLY ------------------------------------------------------------------

enum class PlyType { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

PlyType ply_type(const std::string& name, std::size_t line) {
  if (name == "char" || name == "int8") return PlyType::int8;
  if (name == "uchar" || name == "uint8") return PlyType::uint8;
  if (name == "short" || name == "int16") return PlyType::int16;
  if (name == "ushort" || name == "uint16") return PlyType::uint16;
  if (name == "int" || name == "int32") return PlyType::int32;
  if (name == "uint" || name == "uint32") return PlyType::uint32;
  if (name == "float" || name == "float32") return PlyType::float32;
  if (name == "double" || name == "float64") return PlyType::float64;
  throw ParseError("unknown PLY property type '" + name + "'", line);
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::float64;
  bool is_list = false;
  PlyType count_type = PlyType::uint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

template <typename T>
T read_le(std::istream& in) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

class PlyValueReader {
 public:
  PlyValueReader(std::istream& in, bool binary) : in_(in), binary_(binary) {}

  double read(PlyType type) {
    if (!binary_) {
      std::string token;
      if (!(in_ >> token)) throw ParseError("unexpected end of PLY data", element_);
      double value = 0.0;
      if (!parse_double(token, value)) throw ParseError("malformed PLY value '" + token + "'", element_);
      return value;
    }
    double value = 0.0;
    switch (type) {
      case PlyType::int8: value = read_le<std::int8_t>(in_); break;
      case PlyType::uint8: value = read_le<std::uint8_t>(in_); break;
      case PlyType::int16: value = read_le<std::int16_t>(in_); break;
      case PlyType::uint16: value = read_le<std::uint16_t>(in_); break;
      case PlyType::int32: value = read_le<std::int32_t>(in_); break;
      case PlyType::uint32: value = read_le<std::uint32_t>(in_); break;
      case PlyType::float32: value = read_le<float>(in_); break;
      case PlyType::float64: value = read_le<double>(in_); break;
    }
    if (!in_) throw ParseError("unexpected end of PLY data", element_);
    return value;
  }

  void set_element(std::size_t index) { element_ = index; }

 private:
  std::istream& in_;
  bool binary_;
  std::size_t element_ = 0;
};

}  // namespace

TriangleMesh read_obj(std::istream& in) {
  std::vector<Eigen::Vector3d> points;
  std::vector<std::array<int, 3>> triangles;
  std::string line;
  std::size_t line_no = 0;
  std::vector<int> polygon;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;

    if (tag == "v") {
      Eigen::Vector3d p;
      for (int k = 0; k < 3; ++k) {
        std::string token;
        if (!(ss >> token) || !parse_double(token, p[k])) throw ParseError("malformed vertex", line_no);
      }
      points.push_back(p);
    } else if (tag == "f") {
      polygon.clear();
      std::string token;
      while (ss >> token) {
        // Keep the position index of "v", "v/vt", "v//vn" or "v/vt/vn".
        const std::string_view head = std::string_view(token).substr(0, token.find('/'));
        long index = 0;
        if (!parse_long(head, index) || index == 0) throw ParseError("malformed face index '" + token + "'", line_no);
        const long resolved = index > 0 ? index - 1 : static_cast<long>(points.size()) + index;
        if (resolved < 0) throw ParseError("face index out of range", line_no);
        polygon.push_back(static_cast<int>(resolved));
      }
      if (polygon.size() < 3) throw ParseError("face with fewer than 3 vertices", line_no);
      fan_triangulate(polygon, triangles);
    }
    // vt, vn, o, g, s, usemtl, mtllib, ...: ignored
  }
  return build_mesh(points, triangles);
}

TriangleMesh read_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("unexpected end of PLY header", line_no);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line();
  if (line != "ply") throw ParseError("missing 'ply' magic", line_no);

  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    next_line();
    std::istringstream ss(line);
    std::string keyword;
    ss >> keyword;
    if (keyword == "end_header") break;
    if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
    if (keyword == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw ParseError("unsupported PLY format '" + fmt + "'", line_no);
      }
    } else if (keyword == "element") {
      PlyElement element;
      if (!(ss >> element.name >> element.count)) throw ParseError("malformed element line", line_no);
      elements.push_back(std::move(element));
    } else if (keyword == "property") {
      if (elements.empty()) throw ParseError("property before any element", line_no);
      PlyProperty prop;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ss >> count_type >> item_type;
        prop.is_list = true;
        prop.count_type = ply_type(count_type, line_no);
        prop.type = ply_type(item_type, line_no);
      } else {
        prop.type = ply_type(type, line_no);
      }
      if (!(ss >> prop.name)) throw ParseError("property without a name", line_no);
      elements.back().properties.push_back(prop);
    } else {
      throw ParseError("unexpected PLY header keyword '" + keyword + "'", line_no);
    }
  }

  std::vector<Eigen::Vector3d> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> polygon;
  PlyValueReader reader(in, binary);

  for (const PlyElement& element : elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";
    int xyz[3] = {-1, -1, -1};
    int list_index = -1;
    for (std::size_t p = 0; p < element.properties.size(); ++p) {
      const auto& prop = element.properties[p];
      if (is_vertex && !prop.is_list) {
        if (prop.name == "x") xyz[0] = static_cast<int>(p);
        if (prop.name == "y") xyz[1] = static_cast<int>(p);
        if (prop.name == "z") xyz[2] = static_cast<int>(p);
      }
      if (is_face && prop.is_list && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
        list_index = static_cast<int>(p);
      }
    }
    if (is_vertex && (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0)) {
      throw ParseError("PLY vertex element lacks x/y/z", line_no);
    }
    if (is_face && list_index < 0) throw ParseError("PLY face element lacks a vertex index list", line_no);

    for (std::size_t i = 0; i < element.count; ++i) {
      reader.set_element(i);
      Eigen::Vector3d p = Eigen::Vector3d::Zero();
      polygon.clear();
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const auto& prop = element.properties[k];
        if (!prop.is_list) {
          const double value = reader.read(prop.type);
          for (int c = 0; c < 3; ++c) {
            if (is_vertex && xyz[c] == static_cast<int>(k)) p[c] = value;
          }
          continue;
        }
        const double count = reader.read(prop.count_type);
        if (count < 0 || count != std::floor(count)) throw ParseError("malformed PLY list length", i);
        for (std::size_t c = 0; c < static_cast<std::size_t>(count); ++c) {
          const double value = reader.read(prop.type);
          if (is_face && static_cast<int>(k) == list_index) {
            if (value < 0 || value != std::floor(value)) throw ParseError("malformed PLY face index", i);
            polygon.push_back(static_cast<int>(value));
          }
        }
      }
      if (is_vertex) points.push_back(p);
      if (is_face) {
        if (polygon.size() < 3) throw ParseError("PLY face with fewer than 3 vertices", i);
        fan_triangulate(polygon, triangles);
      }
    }
  }
  return build_mesh(points, triangles);
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open mesh file " + path.string());
  return format == MeshFormat::obj ? read_obj(in) : read_ply(in);
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".obj") return load_mesh(path, MeshFormat::obj);
  if (ext == ".ply") return load_mesh(path, MeshFormat::ply);
  throw std::invalid_argument("unrecognized mesh extension '" + ext + "'");
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(17);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto p = mesh.position(v);
    out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  const auto& F = mesh.faces();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    out << "f " << F(f, 0) + 1 << ' ' << F(f, 1) + 1 << ' ' << F(f, 2) + 1 << '\n';
  }
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_obj(out, mesh);
}

void write_ply_with_scalar(std::ostream& out, const TriangleMesh& mesh, const Eigen::VectorXd& values,
                           const std::string& property_name) {
  if (values.size() != mesh.num_vertices()) {
    throw std::invalid_argument("write_ply_with_scalar: value count does not match vertex count");
  }
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << mesh.num_vertices() << '\n'
      << "property double x\nproperty double y\nproperty double z\n"
      << "property double " << property_name << '\n'
      << "element face " << mesh.num_faces() << '\n'
      << "property list uchar int vertex_indices\nend_header\n";
  out << std::setprecision(17);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto p = mesh.position(v);
    out << p.x() << ' ' << p.y() << ' ' << p.z() << ' ' << values[v] << '\n';
  }
  const auto& F = mesh.faces();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    out << "3 " << F(f, 0) << ' ' << F(f, 1) << ' ' << F(f, 2) << '\n';
  }
}

}  // namespace heatgeo
