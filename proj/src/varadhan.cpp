#include "heatgeo/varadhan.hpp"

#include <mpfr.h>

#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace heatgeo {

namespace {

void check_square_symmetric(const IntegerMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("integer matrix must be square");
  if (A != A.transpose()) throw std::invalid_argument("integer matrix must be symmetric");
}

void check_source(const IntegerMatrix& A, int source) {
  if (source < 0 || source >= A.rows()) throw std::out_of_range("source " + std::to_string(source) + " out of range");
}

IntegerMatrix grid_pattern(int nx, int ny, bool laplacian) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid graph needs positive dimensions");
  const int n = nx * ny;
  IntegerMatrix A = IntegerMatrix::Zero(n, n);
  auto link = [&](int a, int b) {
    A(a, b) = A(b, a) = laplacian ? -1 : 1;
    if (laplacian) {
      ++A(a, a);
      ++A(b, b);
    }
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v = j * nx + i;
      if (i + 1 < nx) link(v, v + 1);
      if (j + 1 < ny) link(v, v + nx);
    }
  }
  return A;
}

}  // namespace

IntegerMatrix grid_adjacency(int nx, int ny) { return grid_pattern(nx, ny, false); }
IntegerMatrix grid_laplacian(int nx, int ny) { return grid_pattern(nx, ny, true); }

IntegerMatrix mesh_adjacency(const TriangleMesh& mesh) {
  IntegerMatrix A = IntegerMatrix::Zero(mesh.num_vertices(), mesh.num_vertices());
  const auto& E = mesh.edges();
  for (int e = 0; e < mesh.num_edges(); ++e) A(E(e, 0), E(e, 1)) = A(E(e, 1), E(e, 0)) = 1;
  return A;
}

long operator_norm_bound(const IntegerMatrix& A) {
  long best = 0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    long sum = 0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) sum += std::abs(static_cast<long>(A(i, j)));
    best = std::max(best, sum);
  }
  return best;
}

Rational inverse_power_of_ten(int k) {
  if (k < 0) throw std::invalid_argument("inverse_power_of_ten: negative exponent");
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(k));
  return Rational(mpz_class(1), den);
}

RationalVector exact_solve(const IntegerMatrix& A, const Rational& t, int source) {
  check_square_symmetric(A);
  check_source(A, source);
  const auto n = static_cast<std::size_t>(A.rows());

  // t = p/q: (q I - p A) u = q delta, all integer.
  const mpz_class p = t.get_num();
  const mpz_class q = t.get_den();
  std::vector<std::vector<mpz_class>> M(n, std::vector<mpz_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      M[i][j] = -p * A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (i == j) M[i][j] += q;
    }
    M[i][n] = (static_cast<int>(i) == source) ? q : mpz_class(0);
  }

  mpz_class previous = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (M[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && M[r][k] == 0) ++r;
      if (r == n) throw SingularSystemError("exact_solve: I - tA is singular");
      std::swap(M[k], M[r]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) {
        mpz_mul(M[i][j].get_mpz_t(), M[i][j].get_mpz_t(), M[k][k].get_mpz_t());
        mpz_submul(M[i][j].get_mpz_t(), M[i][k].get_mpz_t(), M[k][j].get_mpz_t());
        mpz_divexact(M[i][j].get_mpz_t(), M[i][j].get_mpz_t(), previous.get_mpz_t());
      }
      M[i][k] = 0;
    }
    previous = M[k][k];
  }

  RationalVector u(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc(M[i][n]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (M[i][j] != 0) acc -= Rational(M[i][j]) * u[j];
    }
    u[i] = acc / Rational(M[i][i]);
    u[i].canonicalize();
  }
  return u;
}

RationalVector exact_residual(const IntegerMatrix& A, const Rational& t, int source, const RationalVector& u) {
  check_square_symmetric(A);
  check_source(A, source);
  const auto n = static_cast<std::size_t>(A.rows());
  if (u.size() != n) throw std::invalid_argument("exact_residual: dimension mismatch");
  RationalVector r(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational acc = u[i];
    for (std::size_t j = 0; j < n; ++j) {
      const int a = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (a != 0) acc -= t * a * u[j];
    }
    if (static_cast<int>(i) == source) acc -= 1;
    r[i] = acc;
  }
  return r;
}

std::vector<int> bfs_distance(const IntegerMatrix& A, int source) {
  check_square_symmetric(A);
  check_source(A, source);
  const auto n = A.rows();
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::queue<int> queue;
  dist[static_cast<std::size_t>(source)] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (Eigen::Index u = 0; u < n; ++u) {
      if (u != v && A(v, u) != 0 && dist[static_cast<std::size_t>(u)] < 0) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push(static_cast<int>(u));
      }
    }
  }
  return dist;
}

std::vector<int> first_nonzero_series_term(const IntegerMatrix& A, int source, int max_power) {
  check_square_symmetric(A);
  check_source(A, source);
  const auto n = static_cast<std::size_t>(A.rows());
  std::vector<int> first(n, -1);
  std::vector<mpz_class> x(n), y(n);
  x[static_cast<std::size_t>(source)] = 1;
  for (int k = 0; k <= max_power; ++k) {
    for (std::size_t v = 0; v < n; ++v) {
      if (first[v] < 0 && x[v] != 0) first[v] = k;
    }
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const int a = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (a != 0 && x[j] != 0) y[i] += a * x[j];
      }
    }
    std::swap(x, y);
  }
  return first;
}

double log_ratio(const Rational& x, const Rational& t) {
  if (x == 0) return std::numeric_limits<double>::infinity();
  if (t <= 0 || t == 1) throw std::invalid_argument("log_ratio: t must be positive and different from 1");
  constexpr mpfr_prec_t kBits = 256;
  mpfr_t lx, lt;
  mpfr_init2(lx, kBits);
  mpfr_init2(lt, kBits);
  const Rational ax = abs(x);
  mpfr_set_q(lx, ax.get_mpq_t(), MPFR_RNDN);
  mpfr_log(lx, lx, MPFR_RNDN);
  mpfr_set_q(lt, t.get_mpq_t(), MPFR_RNDN);
  mpfr_log(lt, lt, MPFR_RNDN);
  mpfr_div(lx, lx, lt, MPFR_RNDN);
  const double out = mpfr_get_d(lx, MPFR_RNDN);
  mpfr_clear(lx);
  mpfr_clear(lt);
  return out;
}

std::vector<std::vector<double>> varadhan_exponent(const IntegerMatrix& A, int source,
                                                   const std::vector<Rational>& t_sequence) {
  check_square_symmetric(A);
  check_source(A, source);
  for (int d : bfs_distance(A, source)) {
    if (d < 0) throw std::invalid_argument("varadhan_exponent: graph is not connected");
  }
  const long sigma = operator_norm_bound(A);
  for (std::size_t k = 0; k < t_sequence.size(); ++k) {
    const Rational& t = t_sequence[k];
    if (t <= 0) throw std::invalid_argument("varadhan_exponent: t must be positive");
    if (k > 0 && !(t < t_sequence[k - 1])) throw std::invalid_argument("varadhan_exponent: t must decrease");
    if (sigma > 0 && !(t * sigma < 1)) throw std::invalid_argument("varadhan_exponent: t must be below 1/sigma");
  }

  std::vector<std::vector<double>> out;
  out.reserve(t_sequence.size());
  for (const Rational& t : t_sequence) {
    const RationalVector u = exact_solve(A, t, source);
    std::vector<double> row(u.size());
    for (std::size_t v = 0; v < u.size(); ++v) row[v] = log_ratio(u[v], t);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace heatgeo
