#include "heatgeo/heat.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace heatgeo {

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::neumann: return "neumann";
    case BoundaryCondition::dirichlet: return "dirichlet";
    case BoundaryCondition::averaged: return "averaged";
  }
  return "unknown";
}

BoundaryCondition parse_boundary_condition(std::string_view name) {
  if (name == "neumann") return BoundaryCondition::neumann;
  if (name == "dirichlet") return BoundaryCondition::dirichlet;
  if (name == "averaged") return BoundaryCondition::averaged;
  throw std::invalid_argument("unknown boundary condition '" + std::string(name) + "'");
}

SourceSet::SourceSet(std::span<const int> vertices, int vertex_count) : vertices_(vertices.begin(), vertices.end()) {
  if (vertices_.empty()) throw std::invalid_argument("SourceSet: at least one source vertex is required");
  for (int v : vertices_) {
    if (v < 0 || v >= vertex_count) throw std::out_of_range("SourceSet: source vertex " + std::to_string(v) + " out of range");
  }
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
}

VertexScalarField SourceSet::indicator(int vertex_count) const {
  VertexScalarField u0 = VertexScalarField::Zero(vertex_count);
  for (int v : vertices_) {
    if (v >= vertex_count) throw std::out_of_range("SourceSet: source vertex out of range for mesh");
    u0[v] = 1.0;
  }
  return u0;
}

FaceVectorField normalized_negative_gradient(const TriangleMesh& mesh, const VertexScalarField& u) {
  FaceVectorField X = face_gradient(mesh, u);
  const Eigen::VectorXd norms = X.rowwise().norm();
  const double largest = norms.size() > 0 ? norms.maxCoeff() : 0.0;
  const double cutoff = 1e-300 * largest;
  for (Eigen::Index f = 0; f < X.rows(); ++f) {
    if (norms[f] == 0.0 || norms[f] < cutoff || !std::isfinite(norms[f])) {
      X.row(f).setZero();
    } else {
      X.row(f) /= -norms[f];
    }
  }
  return X;
}

HeatGeodesicSolver::HeatGeodesicSolver(const TriangleMesh& mesh, HeatOptions options)
    : mesh_(mesh), options_(options) {
  if (!(options_.time_multiplier > 0.0) || !std::isfinite(options_.time_multiplier)) {
    throw std::invalid_argument("HeatGeodesicSolver: time multiplier m must be positive");
  }
  if (!(options_.regularization > 0.0)) {
    throw std::invalid_argument("HeatGeodesicSolver: regularization must be positive");
  }
  mean_edge_length_ = heatgeo::mean_edge_length(mesh_);
  time_step_ = options_.time_multiplier * mean_edge_length_ * mean_edge_length_;

  const SparseMatrixd L = cotan_laplacian(mesh_);
  const Eigen::VectorXd mass = mass_matrix(mesh_).diagonal();

  // A - t L_C
  const SparseMatrixd heat = add_diagonal(scale(L, -time_step_), mass);

  const bool need_neumann = options_.boundary != BoundaryCondition::dirichlet;
  const bool need_dirichlet = options_.boundary != BoundaryCondition::neumann;
  // The Neumann heat system and the Poisson system share L_C's pattern.
  const Permutation ordering = compute_ordering(L, options_.ordering);
  if (need_neumann) heat_neumann_ = factorize(heat, ordering);
  if (need_dirichlet) {
    for (int v = 0; v < mesh_.num_vertices(); ++v) {
      if (!mesh_.is_boundary_vertex(v)) interior_.push_back(v);
    }
    heat_dirichlet_ = factorize(principal_submatrix<double>(heat, interior_), options_.ordering);
  }

  // -L_C + eps * s * I
  const Eigen::VectorXd stiffness_diag = -L.diagonal();
  const double s = stiffness_diag.size() > 0 ? stiffness_diag.mean() : 1.0;
  const Eigen::VectorXd shift = Eigen::VectorXd::Constant(L.rows(), options_.regularization * s);
  const SparseMatrixd poisson = add_diagonal(scale(L, -1.0), shift);
  poisson_ = factorize(poisson, ordering);
}

int HeatGeodesicSolver::factor_count() const noexcept {
  return 1 + (heat_neumann_ ? 1 : 0) + (heat_dirichlet_ ? 1 : 0);
}

VertexScalarField HeatGeodesicSolver::solve_heat_neumann(const SourceSet& sources) const {
  if (!heat_neumann_) throw std::logic_error("solve_heat_neumann: solver was built for Dirichlet conditions only");
  return heat_neumann_->solve(sources.indicator(mesh_.num_vertices()));
}

VertexScalarField HeatGeodesicSolver::solve_heat_dirichlet(const SourceSet& sources) const {
  if (!heat_dirichlet_) throw std::logic_error("solve_heat_dirichlet: solver was built for Neumann conditions only");
  const VertexScalarField u0 = sources.indicator(mesh_.num_vertices());
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(interior_.size()));
  for (std::size_t k = 0; k < interior_.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = u0[interior_[k]];
  const Eigen::VectorXd x = heat_dirichlet_->solve(rhs);
  VertexScalarField u = VertexScalarField::Zero(mesh_.num_vertices());
  for (std::size_t k = 0; k < interior_.size(); ++k) u[interior_[k]] = x[static_cast<Eigen::Index>(k)];
  return u;
}

VertexScalarField HeatGeodesicSolver::solve_heat(const SourceSet& sources) const {
  switch (options_.boundary) {
    case BoundaryCondition::neumann: return solve_heat_neumann(sources);
    case BoundaryCondition::dirichlet: return solve_heat_dirichlet(sources);
    case BoundaryCondition::averaged: return 0.5 * (solve_heat_neumann(sources) + solve_heat_dirichlet(sources));
  }
  throw std::logic_error("solve_heat: unknown boundary condition");
}

VertexScalarField HeatGeodesicSolver::recover_distance(const FaceVectorField& X) const {
  if (X.rows() != mesh_.num_faces()) throw std::invalid_argument("recover_distance: field length mismatch");
  // L_C phi = div X, solved as (-L_C + eps s I) phi = -div X.
  const VertexScalarField d = vertex_divergence(mesh_, X);
  VertexScalarField phi = poisson_.solve(-d);
  if (phi.size() > 0) phi.array() -= phi.minCoeff();
  return phi;
}

VertexScalarField HeatGeodesicSolver::geodesic_distance(const SourceSet& sources, HeatDiagnostics* diagnostics) const {
  if (static_cast<int>(sources.size()) == mesh_.num_vertices()) {
    if (diagnostics) diagnostics->underflow_vertices = 0;
    return VertexScalarField::Zero(mesh_.num_vertices());
  }
  const VertexScalarField u = solve_heat(sources);
  const int zeros = static_cast<int>((u.array() == 0.0).count());
  // Dirichlet rows are pinned to zero by construction; only count the rest.
  int underflow = zeros;
  if (options_.boundary == BoundaryCondition::dirichlet) {
    underflow = 0;
    for (int v : interior_) underflow += u[v] == 0.0 ? 1 : 0;
  }
  if (diagnostics) diagnostics->underflow_vertices = underflow;
  if (underflow > 0) {
    std::clog << "heatgeo: warning: heat solution is exactly zero at " << underflow
              << " vertices; increase the time multiplier m\n";
  }
  return recover_distance(normalized_negative_gradient(mesh_, u));
}

VertexScalarField smoothed_distance(const HeatGeodesicSolver& solver, const SourceSet& sources) {
  if (!(solver.options().time_multiplier > 1.0)) {
    throw std::invalid_argument("smoothed_distance: requires a solver with time multiplier m > 1");
  }
  return solver.geodesic_distance(sources);
}

}  // namespace heatgeo
