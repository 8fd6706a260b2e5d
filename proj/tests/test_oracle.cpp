#include "heatgeo/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace heatgeo;

namespace {

// All-pairs shortest paths over the edge graph.
Eigen::MatrixXd floyd_warshall(const TriangleMesh& m) {
  const int n = m.num_vertices();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
  d.diagonal().setZero();
  for (int f = 0; f < m.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = m.faces()(f, k), b = m.faces()(f, (k + 1) % 3);
      d(a, b) = d(b, a) = (m.position(a) - m.position(b)).norm();
    }
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

}  // namespace

TEST_CASE("dijkstra_distance") {
  SUBCASE("grid(3, 3) by hand") {
    const auto m = make_grid(3, 3, 1.0);
    const auto d = dijkstra_distance(m, SourceSet({0}, 9));
    CHECK(d[0] == 0.0);
    CHECK(d[1] == doctest::Approx(1.0));
    // "/" diagonals give the direct route to the far corner
    CHECK(d[8] == doctest::Approx(2.0 * std::sqrt(2.0)));
    const auto d2 = dijkstra_distance(m, SourceSet({2}, 9));
    CHECK(d2[6] == doctest::Approx(4.0));
  }
  SUBCASE("agrees with Floyd-Warshall") {
    for (const auto& m : {make_perturbed_grid(6, 5, 1, 0.3, 3), make_icosphere(1), make_torus(2, 0.5, 8, 5)}) {
      const auto all = floyd_warshall(m);
      for (int s : {0, 7, m.num_vertices() - 1}) {
        const auto d = dijkstra_distance(m, SourceSet({s}, m.num_vertices()));
        for (int v = 0; v < m.num_vertices(); ++v) CHECK(d[v] == doctest::Approx(all(s, v)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("multiple sources take the minimum") {
    const auto m = make_icosphere(2);
    const auto all = floyd_warshall(m);
    const auto d = dijkstra_distance(m, SourceSet({3, 90}, m.num_vertices()));
    for (int v = 0; v < m.num_vertices(); ++v) CHECK(d[v] == doctest::Approx(std::min(all(3, v), all(90, v))));
  }
  SUBCASE("graph distance is bounded below by the straight line") {
    const auto m = make_icosphere(3);
    const auto d = dijkstra_distance(m, SourceSet({0}, m.num_vertices()));
    for (int v = 0; v < m.num_vertices(); ++v) CHECK(d[v] >= (m.position(v) - m.position(0)).norm() - 1e-12);
    // chords undercut arcs by at most about h^2 over these distances
    const double h = mean_edge_length(m);
    CHECK((d - analytic_distance(AnalyticKind::sphere, m, 0)).minCoeff() >= -2 * h * h);
  }
  SUBCASE("graph distance never beats the plane distance") {
    const auto m = make_perturbed_grid(9, 9, 1, 0.3, 4);
    const auto d = dijkstra_distance(m, SourceSet({40}, m.num_vertices()));
    CHECK((d - analytic_distance(AnalyticKind::plane, m, 40)).minCoeff() >= -1e-9);
  }
}

TEST_CASE("analytic_distance") {
  const auto sphere = make_icosphere(2);
  const auto phi = analytic_distance(AnalyticKind::sphere, sphere, 0);
  CHECK(phi[0] == 0.0);
  CHECK(phi.maxCoeff() == doctest::Approx(std::numbers::pi).epsilon(1e-12));

  const auto grid = make_grid(4, 5, 1.0);
  const auto plane = analytic_distance(AnalyticKind::plane, grid, 0);
  CHECK(plane[0] == 0.0);
  CHECK(plane[3 * 4 + 3] == doctest::Approx(std::sqrt(18.0)));
  CHECK(plane[4 * 4 + 0] == doctest::Approx(4.0));
  CHECK(analytic_distance(AnalyticKind::plane, grid, 19)[3 * 4 + 0] == doctest::Approx(std::sqrt(10.0)));

  CHECK_THROWS_AS(analytic_distance(AnalyticKind::sphere, grid, 0), std::invalid_argument);
  CHECK_THROWS_AS(analytic_distance(AnalyticKind::plane, sphere, 0), std::invalid_argument);
  CHECK_THROWS_AS(analytic_distance(AnalyticKind::plane, grid, 20), std::out_of_range);
}

TEST_CASE("mean_relative_error") {
  Eigen::VectorXd truth(4), phi(4);
  truth << 0.0, 1.0, 2.0, 4.0;
  phi << 0.1, 1.1, 2.0, 3.0;
  // floor = 0.05 * 10 = 0.5
  CHECK(mean_relative_error(phi, truth, 10.0) == doctest::Approx((0.1 / 0.5 + 0.1 / 1.0 + 0.0 + 1.0 / 4.0) / 4.0));
  CHECK(mean_relative_error(truth, truth, 1.0) == 0.0);
  CHECK_THROWS_AS(mean_relative_error(phi, Eigen::VectorXd(3), 1.0), std::invalid_argument);
}

TEST_CASE("metric_violation_scan") {
  SUBCASE("exact distances have no violations") {
    const auto m = make_icosphere(2);
    std::map<int, VertexScalarField> fields;
    for (int s : {0, 5, 17, 60, 100, 150}) fields[s] = analytic_distance(AnalyticKind::sphere, m, s);
    const auto r = metric_violation_scan(fields, m.diameter());
    CHECK(r.pairs_checked == 50);
    CHECK(r.triples_checked == 200);
    CHECK(r.max_symmetry < 1e-14);
    CHECK(r.max_triangle < 1e-14);
    CHECK(r.violating_triples.empty());
  }
  SUBCASE("planted asymmetry and violation") {
    VertexScalarField a = VertexScalarField::Zero(3), b = VertexScalarField::Zero(3);
    a << 0.0, 1.0, 5.0;  // a(z=2) = 5 > a(1) + b(2) = 1 + 1
    b << 1.5, 0.0, 1.0;
    const std::map<int, VertexScalarField> fields{{0, a}, {1, b}};
    const auto r = metric_violation_scan(fields, 10.0, {.pairs = 10, .triples = 400, .seed = 3});
    CHECK(r.max_symmetry == doctest::Approx(0.05));
    CHECK(r.max_triangle == doctest::Approx(0.3));
    CHECK(!r.violating_triples.empty());
    for (const auto& t : r.violating_triples) CHECK(t.excess > 0.0);
  }
  SUBCASE("deterministic under a seed") {
    const auto m = make_icosphere(2);
    std::map<int, VertexScalarField> fields;
    for (int s : {0, 9, 33}) fields[s] = dijkstra_distance(m, SourceSet({s}, m.num_vertices()));
    const auto r1 = metric_violation_scan(fields, 2.0, {.seed = 99});
    const auto r2 = metric_violation_scan(fields, 2.0, {.seed = 99});
    CHECK(r1.max_symmetry == r2.max_symmetry);
    CHECK(r1.max_triangle == r2.max_triangle);
  }
  CHECK_THROWS_AS(metric_violation_scan({{0, VertexScalarField::Zero(3)}}, 1.0), std::invalid_argument);
}

TEST_CASE("study meshes") {
  CHECK(parse_mesh_family("icosphere") == MeshFamily::icosphere);
  CHECK(to_string(MeshFamily::grid) == "grid");
  CHECK_THROWS_AS(parse_mesh_family("bunny"), std::invalid_argument);
  const auto g = make_study_mesh(MeshFamily::grid, 4);
  CHECK(g.mesh.num_vertices() == 25);
  CHECK(g.mesh.position(g.source).isApprox(Eigen::Vector3d(0.5, 0.5, 0)));
  CHECK_THROWS_AS(make_study_mesh(MeshFamily::grid, 5), std::invalid_argument);
}

TEST_CASE("convergence_study") {
  const auto rows = convergence_study(MeshFamily::icosphere, {2, 3, 4}, 1.0);
  REQUIRE(rows.size() == 3);
  CHECK(!rows[0].observed_order);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].h < rows[k - 1].h);
    CHECK(rows[k].linf_error < rows[k - 1].linf_error);
    const double order = std::log(rows[k - 1].linf_error / rows[k].linf_error) / std::log(rows[k - 1].h / rows[k].h);
    CHECK(*rows[k].observed_order == doctest::Approx(order));
  }
  CHECK_THROWS_AS(convergence_study(MeshFamily::grid, {}, 1.0), std::invalid_argument);
}
