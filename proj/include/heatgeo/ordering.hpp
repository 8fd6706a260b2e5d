#pragma once

#include "heatgeo/sparse.hpp"

#include <numeric>
#include <vector>

namespace heatgeo {

/// `perm[k]` is the original index of the k-th pivot.
using Permutation = std::vector<int>;

enum class OrderingMethod { identity, minimum_degree };

Permutation identity_ordering(int n);

/// Minimum-degree ordering of the graph given by symmetric adjacency lists
/// (self loops ignored). Ties go to the lowest vertex index.
Permutation minimum_degree_ordering(const std::vector<std::vector<int>>& adjacency);

/// Off-diagonal adjacency of a symmetric sparsity pattern.
template <typename Scalar>
std::vector<std::vector<int>> adjacency_of(const SymmetricSparseMatrix<Scalar>& m) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m.rows()));
  const auto cp = m.col_ptr();
  const auto ri = m.row_indices();
  for (int j = 0; j < m.cols(); ++j) {
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      if (ri[p] == j) continue;
      adj[static_cast<std::size_t>(j)].push_back(ri[p]);
      adj[static_cast<std::size_t>(ri[p])].push_back(j);
    }
  }
  return adj;
}

template <typename Scalar>
Permutation compute_ordering(const SymmetricSparseMatrix<Scalar>& m,
                             OrderingMethod method = OrderingMethod::minimum_degree) {
  if (method == OrderingMethod::identity) return identity_ordering(m.rows());
  return minimum_degree_ordering(adjacency_of(m));
}

bool is_permutation_of_range(const Permutation& perm);

}  // namespace heatgeo
