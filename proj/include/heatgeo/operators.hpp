#pragma once

#include "heatgeo/mesh.hpp"
#include "heatgeo/sparse.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace heatgeo {

/// One value per vertex.
using VertexScalarField = Eigen::VectorXd;
/// One tangent 3-vector per face, stored as rows.
using FaceVectorField = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Cotan operator: off-diagonal (i, j) = 1/2 (cot a_ij + cot b_ij), diagonal
/// = minus the off-diagonal row sum. Negative semidefinite. Boundary edges
/// carry a single cotan term.
SparseMatrixd cotan_laplacian(const TriangleMesh& mesh);

/// Lumped mass: one third of the incident face area per vertex.
Eigen::DiagonalMatrix<double, Eigen::Dynamic> mass_matrix(const TriangleMesh& mesh);

/// Constant gradient of the piecewise-linear interpolant of `u` per face.
FaceVectorField face_gradient(const TriangleMesh& mesh, const VertexScalarField& u);

/// Integrated divergence per vertex:
///   1/2 sum_faces cot(t1) (e1 . X) + cot(t2) (e2 . X)
/// with e1, e2 the face edges leaving the vertex and t1, t2 the opposite
/// corner angles. Equals -G^T M_f X, so divergence(gradient(u)) = L_C u.
VertexScalarField vertex_divergence(const TriangleMesh& mesh, const FaceVectorField& X);

/// Face areas A_f.
Eigen::VectorXd face_areas(const TriangleMesh& mesh);

/// Gradient as a (3F x V) matrix; rows 3f..3f+2 hold face f's components.
Eigen::SparseMatrix<double> gradient_matrix(const TriangleMesh& mesh);

/// Divergence as a (V x 3F) matrix matching vertex_divergence.
Eigen::SparseMatrix<double> divergence_matrix(const TriangleMesh& mesh);

}  // namespace heatgeo
