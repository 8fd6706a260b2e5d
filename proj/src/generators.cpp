#include "heatgeo/mesh.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <utility>

namespace heatgeo {

namespace {

Points to_points(const std::vector<Eigen::Vector3d>& pts) {
  Points P(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) P.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return P;
}

Faces to_faces(const std::vector<std::array<int, 3>>& tris) {
  Faces F(static_cast<Eigen::Index>(tris.size()), 3);
  for (std::size_t i = 0; i < tris.size(); ++i) {
    for (int k = 0; k < 3; ++k) F(static_cast<Eigen::Index>(i), k) = tris[i][k];
  }
  return F;
}

}  // namespace

TriangleMesh make_icosphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 10) {
    throw std::invalid_argument("make_icosphere: subdivisions must be in [0, 10]");
  }
  const double z = 1.0 / std::sqrt(5.0);
  const double r = 2.0 / std::sqrt(5.0);
  std::vector<Eigen::Vector3d> pts;
  pts.emplace_back(0.0, 0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 5.0;
    pts.emplace_back(r * std::cos(a), r * std::sin(a), z);
  }
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * std::numbers::pi * (k + 0.5) / 5.0;
    pts.emplace_back(r * std::cos(a), r * std::sin(a), -z);
  }
  pts.emplace_back(0.0, 0.0, -1.0);

  std::vector<std::array<int, 3>> tris;
  for (int k = 0; k < 5; ++k) {
    const int u0 = 1 + k, u1 = 1 + (k + 1) % 5;
    const int l0 = 6 + k, l1 = 6 + (k + 1) % 5;
    tris.push_back({0, u0, u1});
    tris.push_back({u0, l0, u1});
    tris.push_back({u1, l0, l1});
    tris.push_back({11, l1, l0});
  }
  // Orient outward.
  for (auto& t : tris) {
    const Eigen::Vector3d n = (pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]);
    if (n.dot(pts[t[0]] + pts[t[1]] + pts[t[2]]) < 0) std::swap(t[1], t[2]);
  }

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      pts.push_back((pts[a] + pts[b]).normalized());
      const int index = static_cast<int>(pts.size()) - 1;
      midpoint.emplace(key, index);
      return index;
    };
    std::vector<std::array<int, 3>> refined;
    refined.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const int a = mid(t[0], t[1]);
      const int b = mid(t[1], t[2]);
      const int c = mid(t[2], t[0]);
      refined.push_back({t[0], a, c});
      refined.push_back({t[1], b, a});
      refined.push_back({t[2], c, b});
      refined.push_back({a, b, c});
    }
    tris = std::move(refined);
  }
  return TriangleMesh(to_points(pts), to_faces(tris));
}

TriangleMesh make_torus(double major_radius, double minor_radius, int nu, int nv) {
  if (!(major_radius > minor_radius && minor_radius > 0.0)) {
    throw std::invalid_argument("make_torus: requires R > r > 0");
  }
  if (nu < 3 || nv < 3) throw std::invalid_argument("make_torus: nu and nv must be at least 3");
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(nu) * nv);
  for (int j = 0; j < nv; ++j) {
    const double v = 2.0 * std::numbers::pi * j / nv;
    for (int i = 0; i < nu; ++i) {
      const double u = 2.0 * std::numbers::pi * i / nu;
      const double ring = major_radius + minor_radius * std::cos(v);
      pts.emplace_back(ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto id = [&](int i, int j) { return ((j + nv) % nv) * nu + (i + nu) % nu; };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  return TriangleMesh(to_points(pts), to_faces(tris));
}

TriangleMesh make_grid(int nx, int ny, double spacing) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("make_grid: nx and ny must be at least 2");
  if (!(spacing > 0.0)) throw std::invalid_argument("make_grid: spacing must be positive");
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) pts.emplace_back(i * spacing, j * spacing, 0.0);
  }
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i, b = a + 1, c = a + nx + 1, d = a + nx;
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  return TriangleMesh(to_points(pts), to_faces(tris));
}

TriangleMesh make_perturbed_grid(int nx, int ny, double spacing, double noise, unsigned long long seed) {
  if (!(noise >= 0.0 && noise < 0.5 * spacing)) {
    throw std::invalid_argument("make_perturbed_grid: noise must be in [0, 0.5 * spacing)");
  }
  const TriangleMesh base = make_grid(nx, ny, spacing);
  Points P = base.positions();
  const auto& F = base.faces();
  const double min_signed_area = 0.25 * 0.5 * spacing * spacing;

  auto signed_area = [&](int f) {
    const Eigen::Vector2d a = P.row(F(f, 0)).head<2>().transpose();
    const Eigen::Vector2d b = P.row(F(f, 1)).head<2>().transpose();
    const Eigen::Vector2d c = P.row(F(f, 2)).head<2>().transpose();
    const Eigen::Vector2d ab = b - a, ac = c - a;
    return 0.5 * (ab.x() * ac.y() - ab.y() * ac.x());
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-noise, noise);
  constexpr int kMaxDraws = 64;
  for (int v = 0; v < base.num_vertices(); ++v) {
    if (base.is_boundary_vertex(v)) continue;
    const Eigen::RowVector3d home = P.row(v);
    for (int draw = 0; draw < kMaxDraws; ++draw) {
      P(v, 0) = home(0) + jitter(rng);
      P(v, 1) = home(1) + jitter(rng);
      bool ok = true;
      for (int f : base.incident_faces(v)) ok = ok && signed_area(f) > min_signed_area;
      if (ok) break;
      P.row(v) = home;
    }
  }
  return TriangleMesh(std::move(P), base.faces());
}

}  // namespace heatgeo
