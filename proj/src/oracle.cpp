#include "heatgeo/oracle.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

namespace heatgeo {

VertexScalarField dijkstra_distance(const TriangleMesh& mesh, const SourceSet& sources) {
  const int n = mesh.num_vertices();
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  const auto& E = mesh.edges();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int a = E(e, 0), b = E(e, 1);
    const double w = (mesh.position(a) - mesh.position(b)).norm();
    adj[static_cast<std::size_t>(a)].emplace_back(b, w);
    adj[static_cast<std::size_t>(b)].emplace_back(a, w);
  }

  VertexScalarField dist = VertexScalarField::Constant(n, std::numeric_limits<double>::infinity());
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (int s : sources.vertices()) {
    if (s >= n) throw std::out_of_range("dijkstra_distance: source out of range");
    dist[s] = 0.0;
    queue.emplace(0.0, s);
  }
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& [u, w] : adj[static_cast<std::size_t>(v)]) {
      if (d + w < dist[u]) {
        dist[u] = d + w;
        queue.emplace(dist[u], u);
      }
    }
  }
  return dist;
}

VertexScalarField analytic_distance(AnalyticKind kind, const TriangleMesh& mesh, int source_vertex) {
  const int n = mesh.num_vertices();
  if (source_vertex < 0 || source_vertex >= n) throw std::out_of_range("analytic_distance: source out of range");
  const Eigen::Vector3d src = mesh.position(source_vertex);
  VertexScalarField phi(n);

  if (kind == AnalyticKind::sphere) {
    for (int v = 0; v < n; ++v) {
      if (std::abs(mesh.position(v).norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("analytic_distance: vertex " + std::to_string(v) + " is not on the unit sphere");
      }
    }
    for (int v = 0; v < n; ++v) phi[v] = std::acos(std::clamp(src.dot(mesh.position(v)), -1.0, 1.0));
    return phi;
  }

  if (mesh.num_faces() > 0) {
    const FaceGeometry g = face_geometry(mesh, 0);
    const Eigen::Vector3d p0 = mesh.position(mesh.faces()(0, 0));
    for (int v = 0; v < n; ++v) {
      if (std::abs(g.normal.dot(mesh.position(v) - p0)) > 1e-9 * std::max(mesh.diameter(), 1.0)) {
        throw std::invalid_argument("analytic_distance: vertex " + std::to_string(v) + " is off the mesh plane");
      }
    }
  }
  for (int v = 0; v < n; ++v) phi[v] = (mesh.position(v) - src).norm();
  return phi;
}

double mean_relative_error(const VertexScalarField& phi, const VertexScalarField& truth, double diameter) {
  if (phi.size() != truth.size() || phi.size() == 0) {
    throw std::invalid_argument("mean_relative_error: field sizes differ or are empty");
  }
  const double floor = 0.05 * diameter;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) sum += std::abs(phi[i] - truth[i]) / std::max(truth[i], floor);
  return sum / static_cast<double>(phi.size());
}

MetricReport metric_violation_scan(const std::map<int, VertexScalarField>& phi_by_source, double diameter,
                                   const MetricScanOptions& options) {
  if (phi_by_source.size() < 2) throw std::invalid_argument("metric_violation_scan: needs at least two source fields");
  if (!(diameter > 0.0)) throw std::invalid_argument("metric_violation_scan: diameter must be positive");
  std::vector<int> keys;
  for (const auto& [k, field] : phi_by_source) keys.push_back(k);
  const auto n = phi_by_source.begin()->second.size();
  for (const auto& [k, field] : phi_by_source) {
    if (field.size() != n) throw std::invalid_argument("metric_violation_scan: fields differ in length");
    if (k < 0 || k >= n) throw std::out_of_range("metric_violation_scan: source key outside the field");
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick_key(0, keys.size() - 1);
  std::uniform_int_distribution<Eigen::Index> pick_vertex(0, n - 1);
  auto distinct_pair = [&]() {
    const std::size_t a = pick_key(rng);
    std::size_t b = pick_key(rng);
    while (b == a) b = pick_key(rng);
    return std::pair{keys[a], keys[b]};
  };

  MetricReport report;
  for (int p = 0; p < options.pairs; ++p) {
    const auto [x, y] = distinct_pair();
    const double v = std::abs(phi_by_source.at(x)[y] - phi_by_source.at(y)[x]) / diameter;
    report.max_symmetry = std::max(report.max_symmetry, v);
    ++report.pairs_checked;
  }
  for (int t = 0; t < options.triples; ++t) {
    const auto [x, y] = distinct_pair();
    const auto z = pick_vertex(rng);
    const auto& px = phi_by_source.at(x);
    const auto& py = phi_by_source.at(y);
    const double excess = (px[z] - px[y] - py[z]) / diameter;
    report.max_triangle = std::max(report.max_triangle, std::max(0.0, excess));
    if (excess > options.tolerance) report.violating_triples.push_back({x, y, static_cast<int>(z), excess});
    ++report.triples_checked;
  }
  return report;
}

std::string_view to_string(MeshFamily family) {
  return family == MeshFamily::icosphere ? "icosphere" : "grid";
}

MeshFamily parse_mesh_family(std::string_view name) {
  if (name == "icosphere") return MeshFamily::icosphere;
  if (name == "grid") return MeshFamily::grid;
  throw std::invalid_argument("unknown mesh family '" + std::string(name) + "'");
}

StudyMesh make_study_mesh(MeshFamily family, int level) {
  if (family == MeshFamily::icosphere) return {make_icosphere(level), 0, AnalyticKind::sphere};
  if (level < 2 || level % 2 != 0) throw std::invalid_argument("make_study_mesh: grid level must be even and >= 2");
  const int side = level + 1;
  const int centre = (level / 2) * side + level / 2;
  return {make_grid(side, side, 1.0 / level), centre, AnalyticKind::plane};
}

std::vector<ConvergenceRow> convergence_study(MeshFamily family, const std::vector<int>& levels, double m) {
  if (levels.empty()) throw std::invalid_argument("convergence_study: at least one level is required");
  std::vector<ConvergenceRow> rows;
  for (int level : levels) {
    const StudyMesh study = make_study_mesh(family, level);
    const HeatGeodesicSolver solver(study.mesh, HeatOptions{.time_multiplier = m});
    const VertexScalarField phi = solver.geodesic_distance(SourceSet({study.source}, study.mesh.num_vertices()));
    const VertexScalarField truth = analytic_distance(study.kind, study.mesh, study.source);

    ConvergenceRow row;
    row.level = level;
    row.h = solver.mean_edge_length();
    row.linf_error = (phi - truth).cwiseAbs().maxCoeff();
    row.mean_relative_error = mean_relative_error(phi, truth, study.mesh.diameter());
    if (!rows.empty()) {
      const auto& prev = rows.back();
      row.observed_order = std::log(prev.linf_error / row.linf_error) / std::log(prev.h / row.h);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace heatgeo
