#pragma once

#include "heatgeo/ordering.hpp"
#include "heatgeo/sparse.hpp"

#include <atomic>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatgeo {

/// Non-positive pivot during factorization. `column()` is the original
/// (unpermuted) row/column index of the failing pivot.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(int column, double pivot)
      : std::runtime_error("non-positive pivot " + std::to_string(pivot) + " at column " + std::to_string(column)),
        column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

namespace instrumentation {

inline std::atomic<long>& factorization_counter() {
  static std::atomic<long> count{0};
  return count;
}

inline std::atomic<long>& solve_counter() {
  static std::atomic<long> count{0};
  return count;
}

/// Number of numeric factorizations performed by this process so far.
inline long factorizations() { return factorization_counter().load(); }
inline long solves() { return solve_counter().load(); }

}  // namespace instrumentation

/// L L^T = P M P^T with L lower triangular in compressed columns. Each
/// column stores its diagonal first.
template <typename Scalar>
class CholeskyFactor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  CholeskyFactor() = default;

  int rows() const noexcept { return n_; }
  std::size_t nonZeros() const noexcept { return values_.size(); }
  const Permutation& permutation() const noexcept { return perm_; }
  /// parent[j] in the elimination tree, -1 at roots.
  const std::vector<int>& elimination_tree() const noexcept { return parent_; }

  std::span<const int> col_ptr() const noexcept { return col_ptr_; }
  std::span<const int> row_indices() const noexcept { return row_idx_; }
  std::span<const Scalar> values() const noexcept { return values_; }

  /// Solves M x = b. Safe to call concurrently; all workspace is local.
  Vector solve(const Vector& b) const {
    if (b.size() != n_) throw std::invalid_argument("CholeskyFactor::solve: dimension mismatch");
    instrumentation::solve_counter().fetch_add(1, std::memory_order_relaxed);
    Vector y(n_);
    for (int k = 0; k < n_; ++k) y[k] = b[perm_[k]];
    for (int j = 0; j < n_; ++j) {
      y[j] /= values_[col_ptr_[j]];
      for (int p = col_ptr_[j] + 1; p < col_ptr_[j + 1]; ++p) y[row_idx_[p]] -= values_[p] * y[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      for (int p = col_ptr_[j] + 1; p < col_ptr_[j + 1]; ++p) y[j] -= values_[p] * y[row_idx_[p]];
      y[j] /= values_[col_ptr_[j]];
    }
    Vector x(n_);
    for (int k = 0; k < n_; ++k) x[perm_[k]] = y[k];
    return x;
  }

 private:
  template <typename S>
  friend CholeskyFactor<S> factorize(const SymmetricSparseMatrix<S>&, const Permutation&);

  int n_ = 0;
  Permutation perm_;
  std::vector<int> parent_;
  std::vector<int> col_ptr_{0};
  std::vector<int> row_idx_;
  std::vector<Scalar> values_;
};

namespace detail {

// Upper triangle of P M P^T, compressed by column (row indices unsorted).
struct UpperPattern {
  std::vector<int> col_ptr;
  std::vector<int> row_idx;
  std::vector<int> source;  // position of each entry in the input values
};

inline UpperPattern permuted_upper(int n, std::span<const int> cp, std::span<const int> ri, const Permutation& perm) {
  std::vector<int> pinv(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) pinv[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = k;
  UpperPattern up;
  up.col_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 0; j < n; ++j) {
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      const int a = pinv[static_cast<std::size_t>(ri[p])], b = pinv[static_cast<std::size_t>(j)];
      ++up.col_ptr[static_cast<std::size_t>(std::max(a, b)) + 1];
    }
  }
  for (int j = 0; j < n; ++j) up.col_ptr[j + 1] += up.col_ptr[j];
  up.row_idx.resize(static_cast<std::size_t>(up.col_ptr.back()));
  up.source.resize(up.row_idx.size());
  std::vector<int> next(up.col_ptr.begin(), up.col_ptr.end() - 1);
  for (int j = 0; j < n; ++j) {
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      const int a = pinv[static_cast<std::size_t>(ri[p])], b = pinv[static_cast<std::size_t>(j)];
      const int q = next[static_cast<std::size_t>(std::max(a, b))]++;
      up.row_idx[static_cast<std::size_t>(q)] = std::min(a, b);
      up.source[static_cast<std::size_t>(q)] = p;
    }
  }
  return up;
}

inline std::vector<int> elimination_tree(int n, const UpperPattern& up) {
  std::vector<int> parent(static_cast<std::size_t>(n), -1), ancestor(static_cast<std::size_t>(n), -1);
  for (int k = 0; k < n; ++k) {
    for (int p = up.col_ptr[k]; p < up.col_ptr[k + 1]; ++p) {
      for (int i = up.row_idx[p]; i != -1 && i < k;) {
        const int next = ancestor[static_cast<std::size_t>(i)];
        ancestor[static_cast<std::size_t>(i)] = k;
        if (next == -1) parent[static_cast<std::size_t>(i)] = k;
        i = next;
      }
    }
  }
  return parent;
}

// Nonzero pattern of row k of L (excluding the diagonal), in topological
// order, written to stack[top..n). Returns top.
inline int row_pattern(int k, const UpperPattern& up, const std::vector<int>& parent, std::vector<int>& stack,
                       std::vector<int>& mark) {
  const int n = static_cast<int>(parent.size());
  int top = n;
  mark[static_cast<std::size_t>(k)] = k;
  for (int p = up.col_ptr[k]; p < up.col_ptr[k + 1]; ++p) {
    int i = up.row_idx[p];
    if (i > k) continue;
    int len = 0;
    for (; mark[static_cast<std::size_t>(i)] != k; i = parent[static_cast<std::size_t>(i)]) {
      stack[static_cast<std::size_t>(len++)] = i;
      mark[static_cast<std::size_t>(i)] = k;
    }
    while (len > 0) stack[static_cast<std::size_t>(--top)] = stack[static_cast<std::size_t>(--len)];
  }
  return top;
}

}  // namespace detail

/// Up-looking simplicial Cholesky of P M P^T. Throws FactorizationError on a
/// non-positive pivot.
template <typename Scalar>
CholeskyFactor<Scalar> factorize(const SymmetricSparseMatrix<Scalar>& m, const Permutation& perm) {
  using std::sqrt;
  const int n = m.rows();
  if (static_cast<int>(perm.size()) != n || !is_permutation_of_range(perm)) {
    throw std::invalid_argument("factorize: ordering is not a permutation of the matrix dimension");
  }
  instrumentation::factorization_counter().fetch_add(1, std::memory_order_relaxed);

  const auto up = detail::permuted_upper(n, m.col_ptr(), m.row_indices(), perm);
  CholeskyFactor<Scalar> L;
  L.n_ = n;
  L.perm_ = perm;
  L.parent_ = detail::elimination_tree(n, up);

  std::vector<int> stack(static_cast<std::size_t>(n)), mark(static_cast<std::size_t>(n), -1);
  std::vector<int> counts(static_cast<std::size_t>(n), 1);
  for (int k = 0; k < n; ++k) {
    for (int top = detail::row_pattern(k, up, L.parent_, stack, mark); top < n; ++top) {
      ++counts[static_cast<std::size_t>(stack[static_cast<std::size_t>(top)])];
    }
  }
  L.col_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 0; j < n; ++j) L.col_ptr_[j + 1] = L.col_ptr_[j] + counts[static_cast<std::size_t>(j)];
  L.row_idx_.resize(static_cast<std::size_t>(L.col_ptr_.back()));
  L.values_.resize(L.row_idx_.size());

  std::vector<int> next(L.col_ptr_.begin(), L.col_ptr_.end() - 1);
  std::vector<Scalar> x(static_cast<std::size_t>(n), Scalar(0));
  std::fill(mark.begin(), mark.end(), -1);
  const auto vals = m.values();
  for (int k = 0; k < n; ++k) {
    const int top = detail::row_pattern(k, up, L.parent_, stack, mark);
    x[static_cast<std::size_t>(k)] = Scalar(0);
    for (int p = up.col_ptr[k]; p < up.col_ptr[k + 1]; ++p) {
      x[static_cast<std::size_t>(up.row_idx[p])] += vals[up.source[p]];
    }
    Scalar d = x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(k)] = Scalar(0);
    for (int t = top; t < n; ++t) {
      const int i = stack[static_cast<std::size_t>(t)];
      const Scalar lki = x[static_cast<std::size_t>(i)] / L.values_[L.col_ptr_[i]];
      x[static_cast<std::size_t>(i)] = Scalar(0);
      for (int p = L.col_ptr_[i] + 1; p < next[static_cast<std::size_t>(i)]; ++p) {
        x[static_cast<std::size_t>(L.row_idx_[p])] -= L.values_[p] * lki;
      }
      d -= lki * lki;
      const int p = next[static_cast<std::size_t>(i)]++;
      L.row_idx_[p] = k;
      L.values_[p] = lki;
    }
    if (!(d > Scalar(0))) throw FactorizationError(perm[static_cast<std::size_t>(k)], static_cast<double>(d));
    const int p = next[static_cast<std::size_t>(k)]++;
    L.row_idx_[p] = k;
    L.values_[p] = sqrt(d);
  }
  return L;
}

template <typename Scalar>
CholeskyFactor<Scalar> factorize(const SymmetricSparseMatrix<Scalar>& m,
                                 OrderingMethod method = OrderingMethod::minimum_degree) {
  return factorize(m, compute_ordering(m, method));
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve(const CholeskyFactor<Scalar>& factor,
                                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs) {
  return factor.solve(rhs);
}

}  // namespace heatgeo
