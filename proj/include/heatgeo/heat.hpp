#pragma once

#include "heatgeo/cholesky.hpp"
#include "heatgeo/mesh.hpp"
#include "heatgeo/operators.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace heatgeo {

enum class BoundaryCondition { neumann, dirichlet, averaged };

std::string_view to_string(BoundaryCondition bc);
/// Accepts "neumann", "dirichlet", "averaged".
BoundaryCondition parse_boundary_condition(std::string_view name);

/// Validated, sorted, duplicate-free set of source vertices.
class SourceSet {
 public:
  SourceSet(std::span<const int> vertices, int vertex_count);
  SourceSet(std::initializer_list<int> vertices, int vertex_count)
      : SourceSet(std::span<const int>(vertices.begin(), vertices.size()), vertex_count) {}

  const std::vector<int>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }

  /// Kronecker indicator: 1 at sources, 0 elsewhere.
  VertexScalarField indicator(int vertex_count) const;

 private:
  std::vector<int> vertices_;
};

struct HeatOptions {
  /// t = m * h^2 with h the mean edge length.
  double time_multiplier = 1.0;
  BoundaryCondition boundary = BoundaryCondition::neumann;
  /// Poisson system is -L_C + eps * mean(diag(-L_C)) * I.
  double regularization = 1e-8;
  OrderingMethod ordering = OrderingMethod::minimum_degree;
};

/// Per-query diagnostics.
struct HeatDiagnostics {
  /// Vertices where the heat solution is exactly zero. Nonzero counts on a
  /// connected mesh mean the heat underflowed; use a larger multiplier.
  int underflow_vertices = 0;
};

/// Normalizes -grad u per face; faces with |grad u| below 1e-300 times the
/// largest face gradient (or exactly zero) get the zero vector.
FaceVectorField normalized_negative_gradient(const TriangleMesh& mesh, const VertexScalarField& u);

/// Heat-method geodesic distance with every linear system prefactored at
/// construction. Queries only run triangular solves and are safe to issue
/// concurrently against one solver.
class HeatGeodesicSolver {
 public:
  HeatGeodesicSolver(const TriangleMesh& mesh, HeatOptions options = {});

  const TriangleMesh& mesh() const noexcept { return mesh_; }
  const HeatOptions& options() const noexcept { return options_; }
  double time_step() const noexcept { return time_step_; }
  double mean_edge_length() const noexcept { return mean_edge_length_; }
  BoundaryCondition boundary() const noexcept { return options_.boundary; }

  /// Backward-Euler heat step (A - t L_C) u = u_0 under the configured
  /// boundary condition.
  VertexScalarField solve_heat(const SourceSet& sources) const;
  /// Heat step with zero-Neumann (natural) boundary.
  VertexScalarField solve_heat_neumann(const SourceSet& sources) const;
  /// Heat step with u = 0 on boundary vertices. Equal to the Neumann solve
  /// on closed meshes.
  VertexScalarField solve_heat_dirichlet(const SourceSet& sources) const;

  /// Solves the regularized Poisson problem for the potential of X and
  /// shifts it so the minimum is zero.
  VertexScalarField recover_distance(const FaceVectorField& X) const;

  VertexScalarField geodesic_distance(const SourceSet& sources, HeatDiagnostics* diagnostics = nullptr) const;

  /// Number of factorizations held by this solver (1 Poisson + 1 or 2 heat).
  int factor_count() const noexcept;

 private:
  TriangleMesh mesh_;
  HeatOptions options_;
  double mean_edge_length_ = 0.0;
  double time_step_ = 0.0;
  std::optional<CholeskyFactor<double>> heat_neumann_;
  std::optional<CholeskyFactor<double>> heat_dirichlet_;
  CholeskyFactor<double> poisson_;
  std::vector<int> interior_;  // ascending; rows kept by the Dirichlet system
};

/// Smoothed distance: the same pipeline on a solver built with a large
/// multiplier (10 to 1000 is typical). Requires m > 1.
VertexScalarField smoothed_distance(const HeatGeodesicSolver& solver, const SourceSet& sources);

}  // namespace heatgeo
