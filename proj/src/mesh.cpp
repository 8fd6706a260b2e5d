#include "heatgeo/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace heatgeo {

namespace {

constexpr double kDegenerateAreaFactor = 1e-14;

}  // namespace

TriangleMesh::TriangleMesh(Points positions, Faces faces)
    : positions_(std::move(positions)), faces_(std::move(faces)) {
  const int nv = num_vertices();
  const int nf = num_faces();

  if (nv > 0) {
    const Eigen::RowVector3d lo = positions_.colwise().minCoeff();
    const Eigen::RowVector3d hi = positions_.colwise().maxCoeff();
    diameter_ = (hi - lo).norm();
  }
  if (!positions_.allFinite()) {
    for (int v = 0; v < nv; ++v) {
      if (!positions_.row(v).allFinite()) throw ValidationError("non-finite vertex position", v);
    }
  }

  const double min_area = kDegenerateAreaFactor * diameter_ * diameter_;
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      if (faces_(f, k) < 0 || faces_(f, k) >= nv) throw ValidationError("face index out of range", f);
    }
    if (faces_(f, 0) == faces_(f, 1) || faces_(f, 1) == faces_(f, 2) || faces_(f, 0) == faces_(f, 2)) {
      throw ValidationError("degenerate face", f);
    }
    const Eigen::Vector3d p0 = position(faces_(f, 0));
    const Eigen::Vector3d a = position(faces_(f, 1)) - p0;
    const Eigen::Vector3d b = position(faces_(f, 2)) - p0;
    if (!(0.5 * a.cross(b).norm() > min_area)) throw ValidationError("zero-area face", f);
  }

  // (lo, hi, face) for every face side; sorting groups copies of an edge.
  std::vector<std::tuple<int, int, int>> sides;
  sides.reserve(3 * static_cast<std::size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = faces_(f, k);
      const int b = faces_(f, (k + 1) % 3);
      sides.emplace_back(std::min(a, b), std::max(a, b), f);
    }
  }
  std::sort(sides.begin(), sides.end());

  boundary_.assign(nv, 0);
  std::vector<std::array<int, 2>> unique_edges;
  for (std::size_t i = 0; i < sides.size();) {
    std::size_t j = i;
    while (j < sides.size() && std::get<0>(sides[j]) == std::get<0>(sides[i]) &&
           std::get<1>(sides[j]) == std::get<1>(sides[i])) {
      ++j;
    }
    const auto [lo, hi, face] = sides[i];
    if (j - i > 2) throw ValidationError("non-manifold edge", face);
    if (j - i == 1) {
      boundary_[lo] = 1;
      boundary_[hi] = 1;
    }
    unique_edges.push_back({lo, hi});
    i = j;
  }
  boundary_count_ = static_cast<int>(std::count(boundary_.begin(), boundary_.end(), 1));

  edges_.resize(static_cast<Eigen::Index>(unique_edges.size()), 2);
  for (std::size_t e = 0; e < unique_edges.size(); ++e) {
    edges_(static_cast<Eigen::Index>(e), 0) = unique_edges[e][0];
    edges_(static_cast<Eigen::Index>(e), 1) = unique_edges[e][1];
  }

  vertex_faces_.assign(nv, {});
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) vertex_faces_[faces_(f, k)].push_back(f);
  }
}

FaceGeometry face_geometry(const TriangleMesh& mesh, int f) {
  const auto& F = mesh.faces();
  const std::array<Eigen::Vector3d, 3> p = {mesh.position(F(f, 0)), mesh.position(F(f, 1)),
                                            mesh.position(F(f, 2))};
  FaceGeometry g;
  for (int k = 0; k < 3; ++k) g.edges[k] = p[(k + 2) % 3] - p[(k + 1) % 3];

  const Eigen::Vector3d n = (p[1] - p[0]).cross(p[2] - p[0]);
  const double twice_area = n.norm();
  g.area = 0.5 * twice_area;
  g.normal = n / twice_area;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d a = p[(k + 1) % 3] - p[k];
    const Eigen::Vector3d b = p[(k + 2) % 3] - p[k];
    g.cotans[k] = a.dot(b) / a.cross(b).norm();
  }
  return g;
}

double mean_edge_length(const TriangleMesh& mesh) {
  if (mesh.num_edges() == 0) throw std::invalid_argument("mean_edge_length: mesh has no edges");
  double sum = 0.0;
  const auto& E = mesh.edges();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    sum += (mesh.position(E(e, 0)) - mesh.position(E(e, 1))).norm();
  }
  return sum / mesh.num_edges();
}

double surface_area(const TriangleMesh& mesh) {
  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) total += face_geometry(mesh, f).area;
  return total;
}

TriangleMesh scaled(const TriangleMesh& mesh, double s) {
  return TriangleMesh(mesh.positions() * s, mesh.faces());
}

int nearest_vertex(const TriangleMesh& mesh, const Eigen::Vector3d& point) {
  if (mesh.num_vertices() == 0) throw std::invalid_argument("nearest_vertex: empty mesh");
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double d2 = (mesh.position(v) - point).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = v;
    }
  }
  return best;
}

}  // namespace heatgeo
