#pragma once

#include "heatgeo/mesh.hpp"

#include <Eigen/Core>
#include <gmpxx.h>

#include <stdexcept>
#include <vector>

namespace heatgeo {

/// Dense symmetric integer matrix; its off-diagonal pattern defines a graph.
using IntegerMatrix = Eigen::MatrixXi;
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 0/1 adjacency of the 4-connected nx * ny grid graph, vertex (i, j) at
/// index j * nx + i.
IntegerMatrix grid_adjacency(int nx, int ny);

/// Combinatorial Laplacian D - W of the 4-connected grid graph.
IntegerMatrix grid_laplacian(int nx, int ny);

/// 0/1 adjacency of a mesh's edge graph.
IntegerMatrix mesh_adjacency(const TriangleMesh& mesh);

/// Largest absolute row sum, an upper bound on the operator norm.
long operator_norm_bound(const IntegerMatrix& A);

/// 10^-k as an exact rational.
Rational inverse_power_of_ten(int k);

/// Solves (I - t A) u = delta_source exactly by fraction-free (Bareiss)
/// elimination. Throws SingularSystemError if I - t A is singular.
RationalVector exact_solve(const IntegerMatrix& A, const Rational& t, int source);

/// (I - t A) u - delta_source, computed exactly.
RationalVector exact_residual(const IntegerMatrix& A, const Rational& t, int source, const RationalVector& u);

/// Number of edges from `source` over the off-diagonal pattern of A; -1 for
/// unreachable vertices.
std::vector<int> bfs_distance(const IntegerMatrix& A, int source);

/// min{k : (A^k delta_source)_v != 0} per vertex, -1 if none up to max_power.
std::vector<int> first_nonzero_series_term(const IntegerMatrix& A, int source, int max_power);

/// log|x| / log(t) evaluated with 256-bit MPFR logarithms.
double log_ratio(const Rational& x, const Rational& t);

/// Per entry of `t_sequence` (positive, strictly decreasing, below
/// 1 / operator_norm_bound), the per-vertex values log u_t / log t.
std::vector<std::vector<double>> varadhan_exponent(const IntegerMatrix& A, int source,
                                                   const std::vector<Rational>& t_sequence);

}  // namespace heatgeo
