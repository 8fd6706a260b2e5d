#include "heatgeo/operators.hpp"

#include <Eigen/Geometry>

#include <stdexcept>
#include <vector>

namespace heatgeo {

SparseMatrixd cotan_laplacian(const TriangleMesh& mesh) {
  const auto& F = mesh.faces();
  std::vector<Triplet<double>> t;
  t.reserve(9 * static_cast<std::size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const FaceGeometry g = face_geometry(mesh, f);
    for (int k = 0; k < 3; ++k) {
      // corner k's cotan weights the opposite edge (k+1, k+2)
      const int i = F(f, (k + 1) % 3);
      const int j = F(f, (k + 2) % 3);
      const double w = 0.5 * g.cotans[k];
      t.emplace_back(i, j, w);
      t.emplace_back(i, i, -w);
      t.emplace_back(j, j, -w);
    }
  }
  return assemble<double>(mesh.num_vertices(), t);
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> mass_matrix(const TriangleMesh& mesh) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(mesh.num_vertices());
  const auto& F = mesh.faces();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const double third = face_geometry(mesh, f).area / 3.0;
    for (int k = 0; k < 3; ++k) a[F(f, k)] += third;
  }
  return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(a);
}

Eigen::VectorXd face_areas(const TriangleMesh& mesh) {
  Eigen::VectorXd a(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) a[f] = face_geometry(mesh, f).area;
  return a;
}

FaceVectorField face_gradient(const TriangleMesh& mesh, const VertexScalarField& u) {
  if (u.size() != mesh.num_vertices()) throw std::invalid_argument("face_gradient: field length mismatch");
  const auto& F = mesh.faces();
  FaceVectorField grad(mesh.num_faces(), 3);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const FaceGeometry g = face_geometry(mesh, f);
    // Differences against corner 0, so constant fields give exactly zero.
    const double u0 = u[F(f, 0)];
    const Eigen::Vector3d sum =
        (u[F(f, 1)] - u0) * g.normal.cross(g.edges[1]) + (u[F(f, 2)] - u0) * g.normal.cross(g.edges[2]);
    grad.row(f) = (sum / (2.0 * g.area)).transpose();
  }
  return grad;
}

VertexScalarField vertex_divergence(const TriangleMesh& mesh, const FaceVectorField& X) {
  if (X.rows() != mesh.num_faces()) throw std::invalid_argument("vertex_divergence: field length mismatch");
  const auto& F = mesh.faces();
  VertexScalarField div = VertexScalarField::Zero(mesh.num_vertices());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const FaceGeometry g = face_geometry(mesh, f);
    const Eigen::Vector3d x = X.row(f).transpose();
    for (int k = 0; k < 3; ++k) {
      const int a = (k + 1) % 3, b = (k + 2) % 3;
      // Edges leaving corner k: towards corner a (opposite angle at b) and
      // towards corner b (opposite angle at a).
      const Eigen::Vector3d to_a = g.edges[b];
      const Eigen::Vector3d to_b = -g.edges[a];
      div[F(f, k)] += 0.5 * (g.cotans[b] * to_a.dot(x) + g.cotans[a] * to_b.dot(x));
    }
  }
  return div;
}

Eigen::SparseMatrix<double> gradient_matrix(const TriangleMesh& mesh) {
  const auto& F = mesh.faces();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(9 * static_cast<std::size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const FaceGeometry g = face_geometry(mesh, f);
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d w = g.normal.cross(g.edges[k]) / (2.0 * g.area);
      for (int c = 0; c < 3; ++c) t.emplace_back(3 * f + c, F(f, k), w[c]);
    }
  }
  Eigen::SparseMatrix<double> G(3 * mesh.num_faces(), mesh.num_vertices());
  G.setFromTriplets(t.begin(), t.end());
  return G;
}

Eigen::SparseMatrix<double> divergence_matrix(const TriangleMesh& mesh) {
  const auto& F = mesh.faces();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(9 * static_cast<std::size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const FaceGeometry g = face_geometry(mesh, f);
    for (int k = 0; k < 3; ++k) {
      const int a = (k + 1) % 3, b = (k + 2) % 3;
      const Eigen::Vector3d w = 0.5 * (g.cotans[b] * g.edges[b] - g.cotans[a] * g.edges[a]);
      for (int c = 0; c < 3; ++c) t.emplace_back(F(f, k), 3 * f + c, w[c]);
    }
  }
  Eigen::SparseMatrix<double> D(mesh.num_vertices(), 3 * mesh.num_faces());
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

}  // namespace heatgeo
