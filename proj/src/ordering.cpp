#include "heatgeo/ordering.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <stdexcept>

namespace heatgeo {

Permutation identity_ordering(int n) {
  Permutation perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  return perm;
}

bool is_permutation_of_range(const Permutation& perm) {
  std::vector<char> seen(perm.size(), 0);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= perm.size() || seen[static_cast<std::size_t>(p)]) return false;
    seen[static_cast<std::size_t>(p)] = 1;
  }
  return true;
}

// Explicit elimination graph: eliminating v turns its neighbourhood into a
// clique. Quadratic in the front size, which stays small for surface meshes.
Permutation minimum_degree_ordering(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<std::vector<int>> adj(adjacency.size());
  for (int v = 0; v < n; ++v) {
    auto& list = adj[static_cast<std::size_t>(v)];
    for (int u : adjacency[static_cast<std::size_t>(v)]) {
      if (u < 0 || u >= n) throw std::out_of_range("minimum_degree_ordering: neighbour out of range");
      if (u != v) list.push_back(u);
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  std::set<std::pair<int, int>> queue;  // (degree, vertex)
  for (int v = 0; v < n; ++v) queue.emplace(static_cast<int>(adj[static_cast<std::size_t>(v)].size()), v);

  Permutation perm;
  perm.reserve(static_cast<std::size_t>(n));
  std::vector<int> merged;
  while (!queue.empty()) {
    const int v = queue.begin()->second;
    queue.erase(queue.begin());
    perm.push_back(v);

    std::vector<int> front = std::move(adj[static_cast<std::size_t>(v)]);
    adj[static_cast<std::size_t>(v)].clear();
    for (int u : front) {
      auto& list = adj[static_cast<std::size_t>(u)];
      queue.erase({static_cast<int>(list.size()), u});
      merged.clear();
      std::set_union(list.begin(), list.end(), front.begin(), front.end(), std::back_inserter(merged));
      std::erase_if(merged, [&](int w) { return w == u || w == v; });
      list.swap(merged);
      queue.emplace(static_cast<int>(list.size()), u);
    }
  }
  return perm;
}

}  // namespace heatgeo
