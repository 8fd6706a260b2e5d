#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace heatgeo {

template <typename Scalar>
using Triplet = Eigen::Triplet<Scalar, int>;

/// Symmetric matrix stored as its lower triangle in compressed sparse
/// column form. Row indices within a column are strictly increasing and
/// never above the diagonal.
template <typename Scalar>
class SymmetricSparseMatrix {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SymmetricSparseMatrix() : col_ptr_(1, 0) {}
  explicit SymmetricSparseMatrix(int n) : n_(n), col_ptr_(static_cast<std::size_t>(n) + 1, 0) {
    if (n < 0) throw std::invalid_argument("SymmetricSparseMatrix: negative dimension");
  }

  /// Adopts raw lower-triangle CSC arrays, checking the layout invariants.
  SymmetricSparseMatrix(int n, std::vector<int> col_ptr, std::vector<int> row_idx, std::vector<Scalar> values)
      : n_(n), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)), values_(std::move(values)) {
    if (n_ < 0 || col_ptr_.size() != static_cast<std::size_t>(n_) + 1 || col_ptr_.front() != 0 ||
        static_cast<std::size_t>(col_ptr_.back()) != row_idx_.size() || row_idx_.size() != values_.size()) {
      throw std::invalid_argument("SymmetricSparseMatrix: inconsistent array sizes");
    }
    for (int j = 0; j < n_; ++j) {
      if (col_ptr_[j] > col_ptr_[j + 1]) throw std::invalid_argument("SymmetricSparseMatrix: column pointers decrease");
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
        if (row_idx_[p] < j || row_idx_[p] >= n_ || (p > col_ptr_[j] && row_idx_[p] <= row_idx_[p - 1])) {
          throw std::invalid_argument("SymmetricSparseMatrix: row indices not sorted lower-triangular");
        }
      }
    }
  }

  int rows() const noexcept { return n_; }
  int cols() const noexcept { return n_; }
  /// Stored (lower-triangle) entry count.
  std::size_t nonZeros() const noexcept { return values_.size(); }

  std::span<const int> col_ptr() const noexcept { return col_ptr_; }
  std::span<const int> row_indices() const noexcept { return row_idx_; }
  std::span<const Scalar> values() const noexcept { return values_; }

  Scalar coeff(int i, int j) const {
    if (i < j) std::swap(i, j);
    const auto first = row_idx_.begin() + col_ptr_[j];
    const auto last = row_idx_.begin() + col_ptr_[j + 1];
    const auto it = std::lower_bound(first, last, i);
    return (it != last && *it == i) ? values_[static_cast<std::size_t>(it - row_idx_.begin())] : Scalar(0);
  }

  Vector diagonal() const {
    Vector d = Vector::Zero(n_);
    for (int j = 0; j < n_; ++j) {
      if (col_ptr_[j] < col_ptr_[j + 1] && row_idx_[col_ptr_[j]] == j) d[j] = values_[col_ptr_[j]];
    }
    return d;
  }

 private:
  int n_ = 0;
  std::vector<int> col_ptr_;
  std::vector<int> row_idx_;
  std::vector<Scalar> values_;
};

using SparseMatrixd = SymmetricSparseMatrix<double>;

/// Builds the canonical lower-triangle form. Upper-triangle triplets are
/// mirrored; duplicates are summed. Zero-valued entries stay structural.
template <typename Scalar>
SymmetricSparseMatrix<Scalar> assemble(int dimension, std::span<const Triplet<Scalar>> triplets) {
  if (dimension < 0) throw std::invalid_argument("assemble: negative dimension");
  std::vector<std::pair<std::pair<int, int>, Scalar>> entries;  // ((col, row), value)
  entries.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.col() < 0 || t.row() >= dimension || t.col() >= dimension) {
      throw std::out_of_range("assemble: triplet index (" + std::to_string(t.row()) + ", " +
                              std::to_string(t.col()) + ") out of range");
    }
    const int r = std::max(t.row(), t.col());
    const int c = std::min(t.row(), t.col());
    entries.push_back({{c, r}, t.value()});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<int> col_ptr(static_cast<std::size_t>(dimension) + 1, 0);
  std::vector<int> rows;
  std::vector<Scalar> vals;
  for (std::size_t i = 0; i < entries.size();) {
    Scalar sum = entries[i].second;
    std::size_t j = i + 1;
    for (; j < entries.size() && entries[j].first == entries[i].first; ++j) sum += entries[j].second;
    rows.push_back(entries[i].first.second);
    vals.push_back(sum);
    ++col_ptr[static_cast<std::size_t>(entries[i].first.first) + 1];
    i = j;
  }
  for (int j = 0; j < dimension; ++j) col_ptr[j + 1] += col_ptr[j];
  return SymmetricSparseMatrix<Scalar>(dimension, std::move(col_ptr), std::move(rows), std::move(vals));
}

template <typename Scalar>
SymmetricSparseMatrix<Scalar> assemble(int dimension, const std::vector<Triplet<Scalar>>& triplets) {
  return assemble<Scalar>(dimension, std::span<const Triplet<Scalar>>(triplets));
}

/// Lower-triangle triplets of `m`.
template <typename Scalar>
std::vector<Triplet<Scalar>> to_triplets(const SymmetricSparseMatrix<Scalar>& m) {
  std::vector<Triplet<Scalar>> out;
  out.reserve(m.nonZeros());
  const auto cp = m.col_ptr();
  const auto ri = m.row_indices();
  const auto v = m.values();
  for (int j = 0; j < m.cols(); ++j) {
    for (int p = cp[j]; p < cp[j + 1]; ++p) out.emplace_back(ri[p], j, v[p]);
  }
  return out;
}

/// a * alpha + b * beta on the union pattern.
template <typename Scalar>
SymmetricSparseMatrix<Scalar> linear_combination(Scalar alpha, const SymmetricSparseMatrix<Scalar>& a, Scalar beta,
                                                 const SymmetricSparseMatrix<Scalar>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("linear_combination: dimension mismatch");
  auto ta = to_triplets(a);
  for (auto& t : ta) t = Triplet<Scalar>(t.row(), t.col(), alpha * t.value());
  for (const auto& t : to_triplets(b)) ta.emplace_back(t.row(), t.col(), beta * t.value());
  return assemble<Scalar>(a.rows(), ta);
}

template <typename Scalar>
SymmetricSparseMatrix<Scalar> scale(const SymmetricSparseMatrix<Scalar>& m, Scalar alpha) {
  std::vector<Scalar> v(m.values().begin(), m.values().end());
  for (auto& x : v) x *= alpha;
  return SymmetricSparseMatrix<Scalar>(m.rows(), std::vector<int>(m.col_ptr().begin(), m.col_ptr().end()),
                                       std::vector<int>(m.row_indices().begin(), m.row_indices().end()),
                                       std::move(v));
}

/// m + diag(d).
template <typename Scalar, typename Derived>
SymmetricSparseMatrix<Scalar> add_diagonal(const SymmetricSparseMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& d) {
  if (d.size() != m.rows()) throw std::invalid_argument("add_diagonal: dimension mismatch");
  auto t = to_triplets(m);
  for (int i = 0; i < m.rows(); ++i) t.emplace_back(i, i, d[i]);
  return assemble<Scalar>(m.rows(), t);
}

/// Rows and columns listed in `keep` (ascending), renumbered 0..keep.size()-1.
template <typename Scalar>
SymmetricSparseMatrix<Scalar> principal_submatrix(const SymmetricSparseMatrix<Scalar>& m, std::span<const int> keep) {
  std::vector<int> new_index(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= m.rows() || (k > 0 && keep[k] <= keep[k - 1])) {
      throw std::invalid_argument("principal_submatrix: indices must be ascending and in range");
    }
    new_index[static_cast<std::size_t>(keep[k])] = static_cast<int>(k);
  }
  std::vector<Triplet<Scalar>> t;
  for (const auto& e : to_triplets(m)) {
    const int r = new_index[static_cast<std::size_t>(e.row())];
    const int c = new_index[static_cast<std::size_t>(e.col())];
    if (r >= 0 && c >= 0) t.emplace_back(r, c, e.value());
  }
  return assemble<Scalar>(static_cast<int>(keep.size()), t);
}

/// Full symmetric product (both triangles applied).
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> matvec(const SymmetricSparseMatrix<Scalar>& m,
                                                const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != m.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(m.rows());
  const auto cp = m.col_ptr();
  const auto ri = m.row_indices();
  const auto v = m.values();
  for (int j = 0; j < m.cols(); ++j) {
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      const int i = ri[p];
      y[i] += v[p] * x[j];
      if (i != j) y[j] += v[p] * x[i];
    }
  }
  return y;
}

/// Expands to a full (both triangles) Eigen sparse matrix.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> to_eigen(const SymmetricSparseMatrix<Scalar>& m) {
  std::vector<Eigen::Triplet<Scalar>> t;
  for (const auto& e : to_triplets(m)) {
    t.emplace_back(e.row(), e.col(), e.value());
    if (e.row() != e.col()) t.emplace_back(e.col(), e.row(), e.value());
  }
  Eigen::SparseMatrix<Scalar> out(m.rows(), m.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

/// Matrix Market coordinate format, real symmetric, lower triangle.
template <typename Scalar>
void write_matrix_market(std::ostream& out, const SymmetricSparseMatrix<Scalar>& m) {
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out << std::setprecision(17);
  for (const auto& e : to_triplets(m)) out << e.row() + 1 << ' ' << e.col() + 1 << ' ' << e.value() << '\n';
}

template <typename Scalar>
SymmetricSparseMatrix<Scalar> read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real symmetric", 0) != 0) {
    throw std::runtime_error("read_matrix_market: expected a real symmetric coordinate header");
  }
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream size_line(line);
  int rows = 0, cols = 0;
  std::size_t count = 0;
  if (!(size_line >> rows >> cols >> count) || rows != cols) {
    throw std::runtime_error("read_matrix_market: malformed size line");
  }
  std::vector<Triplet<Scalar>> t;
  t.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    int i = 0, j = 0;
    Scalar v{};
    if (!(in >> i >> j >> v)) throw std::runtime_error("read_matrix_market: truncated entry list");
    t.emplace_back(i - 1, j - 1, v);
  }
  return assemble<Scalar>(rows, t);
}

}  // namespace heatgeo
