#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatgeo {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Edges = Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Raised when a mesh file cannot be parsed. Carries the 1-based line (or
/// element) index where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : std::runtime_error(what + " (at " + std::to_string(location) + ")"),
        location_(location) {}
  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

/// Raised when mesh data violates a structural invariant. `element` is the
/// offending face (or vertex) index.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::size_t element)
      : std::runtime_error(what + " (element " + std::to_string(element) + ")"),
        element_(element) {}
  std::size_t element() const noexcept { return element_; }

 private:
  std::size_t element_;
};

/// Immutable indexed triangle mesh with derived edge and incidence data.
///
/// Construction validates: indices in range, no repeated index in a face,
/// positive face area relative to the squared bounding diameter, and at most
/// two faces per undirected edge.
class TriangleMesh {
 public:
  TriangleMesh(Points positions, Faces faces);

  const Points& positions() const noexcept { return positions_; }
  const Faces& faces() const noexcept { return faces_; }
  /// Unique undirected edges, each stored once with (min, max) endpoints.
  const Edges& edges() const noexcept { return edges_; }

  int num_vertices() const noexcept { return static_cast<int>(positions_.rows()); }
  int num_faces() const noexcept { return static_cast<int>(faces_.rows()); }
  int num_edges() const noexcept { return static_cast<int>(edges_.rows()); }

  Eigen::Vector3d position(int v) const { return positions_.row(v).transpose(); }
  const std::vector<int>& incident_faces(int v) const { return vertex_faces_[v]; }
  bool is_boundary_vertex(int v) const { return boundary_[v] != 0; }
  bool has_boundary() const noexcept { return boundary_count_ > 0; }
  int num_boundary_vertices() const noexcept { return boundary_count_; }

  /// Diagonal of the axis-aligned bounding box.
  double diameter() const noexcept { return diameter_; }

  /// V - E + F.
  int euler_characteristic() const noexcept {
    return num_vertices() - num_edges() + num_faces();
  }

 private:
  Points positions_;
  Faces faces_;
  Edges edges_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<char> boundary_;
  int boundary_count_ = 0;
  double diameter_ = 0.0;
};

/// Per-face quantities. Corner k is `faces(f, k)`; `edges[k]` is the edge
/// vector opposite corner k, oriented counter-clockwise
/// (edges[0] = p2 - p1, edges[1] = p0 - p2, edges[2] = p1 - p0).
struct FaceGeometry {
  double area = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  std::array<Eigen::Vector3d, 3> edges;
  std::array<double, 3> cotans{};
};

FaceGeometry face_geometry(const TriangleMesh& mesh, int f);

/// Mean length over unique edges.
double mean_edge_length(const TriangleMesh& mesh);

/// Sum of face areas.
double surface_area(const TriangleMesh& mesh);

/// Returns a copy with every position multiplied by `s`.
TriangleMesh scaled(const TriangleMesh& mesh, double s);

// ---------------------------------------------------------------------------
// File I/O

enum class MeshFormat { obj, ply };

/// Loads an ASCII OBJ or an ASCII / binary-little-endian PLY. Polygons are
/// fan-triangulated.
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);

/// Picks the format from the file extension.
TriangleMesh load_mesh(const std::filesystem::path& path);

TriangleMesh read_obj(std::istream& in);
TriangleMesh read_ply(std::istream& in);

void write_obj(std::ostream& out, const TriangleMesh& mesh);
void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// ASCII PLY with double x,y,z and an extra double vertex property.
void write_ply_with_scalar(std::ostream& out, const TriangleMesh& mesh,
                           const Eigen::VectorXd& values,
                           const std::string& property_name);

// ---------------------------------------------------------------------------
// Procedural meshes

/// Subdivided icosahedron projected to the unit sphere. Vertex 0 is the
/// north pole (0, 0, 1).
TriangleMesh make_icosphere(int subdivisions);

/// Torus around the z axis with major radius R and tube radius r.
TriangleMesh make_torus(double major_radius, double minor_radius, int nu, int nv);

/// nx * ny vertices in the z = 0 plane, vertex (i, j) at index j * nx + i,
/// every cell split along the diagonal from (i, j) to (i + 1, j + 1).
TriangleMesh make_grid(int nx, int ny, double spacing);

/// make_grid with interior vertices jittered in-plane by up to `noise` per
/// coordinate. Deterministic for a given seed; jitters that would invert a
/// triangle are redrawn.
TriangleMesh make_perturbed_grid(int nx, int ny, double spacing, double noise,
                                 unsigned long long seed);

/// Closest vertex to `point`; ties go to the lowest index.
int nearest_vertex(const TriangleMesh& mesh, const Eigen::Vector3d& point);

}  // namespace heatgeo
