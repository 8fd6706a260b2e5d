#pragma once

#include "heatgeo/heat.hpp"
#include "heatgeo/mesh.hpp"
#include "heatgeo/operators.hpp"

#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace heatgeo {

/// Shortest paths through the edge graph with Euclidean edge weights.
/// Unreachable vertices get +infinity.
VertexScalarField dijkstra_distance(const TriangleMesh& mesh, const SourceSet& sources);

enum class AnalyticKind { sphere, plane };

/// Exact distance on the unit sphere (arccos of the clamped dot product) or
/// in a plane (Euclidean). Throws std::invalid_argument when the mesh is not
/// of the requested family.
VertexScalarField analytic_distance(AnalyticKind kind, const TriangleMesh& mesh, int source_vertex);

/// Mean over vertices of |phi - truth| / max(truth, 0.05 * diameter).
double mean_relative_error(const VertexScalarField& phi, const VertexScalarField& truth, double diameter);

struct TripleViolation {
  int x = 0, y = 0, z = 0;
  /// phi_x(z) - phi_x(y) - phi_y(z), as a fraction of the diameter.
  double excess = 0.0;
};

struct MetricReport {
  /// Largest |phi_x(y) - phi_y(x)| / diameter over the sampled pairs.
  double max_symmetry = 0.0;
  /// Largest max(0, phi_x(z) - phi_x(y) - phi_y(z)) / diameter.
  double max_triangle = 0.0;
  int pairs_checked = 0;
  int triples_checked = 0;
  /// Violations above `tolerance`, in sampling order.
  std::vector<TripleViolation> violating_triples;
};

struct MetricScanOptions {
  int pairs = 50;
  int triples = 200;
  unsigned long long seed = 1;
  /// Violations at or below this fraction of the diameter are not listed.
  double tolerance = 1e-12;
};

/// Samples pairs (x, y) and triples (x, y, z) with x, y drawn from the keys
/// of `phi_by_source` and z from all vertices.
MetricReport metric_violation_scan(const std::map<int, VertexScalarField>& phi_by_source, double diameter,
                                   const MetricScanOptions& options = {});

enum class MeshFamily { icosphere, grid };

std::string_view to_string(MeshFamily family);
MeshFamily parse_mesh_family(std::string_view name);

/// Refinement level to mesh: icosphere(level) with source vertex 0 at the
/// north pole, or a unit-square grid with `level` cells per side and the
/// centre vertex as source (level must be even).
struct StudyMesh {
  TriangleMesh mesh;
  int source = 0;
  AnalyticKind kind = AnalyticKind::sphere;
};
StudyMesh make_study_mesh(MeshFamily family, int level);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double linf_error = 0.0;
  double mean_relative_error = 0.0;
  /// log(e_k / e_{k+1}) / log(h_k / h_{k+1}) against the previous row.
  std::optional<double> observed_order;
};

std::vector<ConvergenceRow> convergence_study(MeshFamily family, const std::vector<int>& levels, double m);

}  // namespace heatgeo
