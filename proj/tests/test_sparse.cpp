#include "heatgeo/cholesky.hpp"
#include "heatgeo/mesh.hpp"
#include "heatgeo/operators.hpp"
#include "heatgeo/sparse.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <random>
#include <sstream>
#include <thread>

using namespace heatgeo;

namespace {

SparseMatrixd tridiagonal(int n) {
  std::vector<Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i + 1 < n) t.emplace_back(i + 1, i, -1.0);
  }
  return assemble<double>(n, t);
}

// Random connected graph Laplacian plus eps * I.
SparseMatrixd random_spd(int n, double eps, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<Triplet<double>> t;
  auto edge = [&](int a, int b) {
    const double x = w(rng);
    t.emplace_back(std::max(a, b), std::min(a, b), -x);
    t.emplace_back(a, a, x);
    t.emplace_back(b, b, x);
  };
  for (int i = 1; i < n; ++i) edge(i, pick(rng) % i);  // spanning tree
  for (int k = 0; k < 2 * n; ++k) {
    const int a = pick(rng), b = pick(rng);
    if (a != b) edge(a, b);
  }
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, eps);
  return assemble<double>(n, t);
}

SparseMatrixd grid_laplacian_plus_identity(int side) {
  const auto mesh = make_grid(side, side, 1.0);
  const auto L = cotan_laplacian(mesh);
  return add_diagonal(scale(L, -1.0), Eigen::VectorXd::Ones(L.rows()));
}

double rel_inf(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

// Dense L L^T from a factor.
Eigen::MatrixXd llt_product(const CholeskyFactor<double>& f) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(f.rows(), f.rows());
  for (int j = 0; j < f.rows(); ++j) {
    for (int p = f.col_ptr()[j]; p < f.col_ptr()[j + 1]; ++p) L(f.row_indices()[p], j) = f.values()[p];
  }
  return L * L.transpose();
}

Eigen::MatrixXd permuted_dense(const SparseMatrixd& m, const Permutation& perm) {
  const Eigen::MatrixXd full = Eigen::MatrixXd(to_eigen(m));
  Eigen::MatrixXd out(m.rows(), m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.rows(); ++j) out(i, j) = full(perm[i], perm[j]);
  }
  return out;
}

}  // namespace

TEST_CASE("assemble") {
  SUBCASE("lower-triangle input") {
    const auto m = assemble<double>(2, {{0, 0, 2.0}, {1, 1, 2.0}, {1, 0, -1.0}});
    CHECK(m.coeff(0, 0) == 2.0);
    CHECK(m.coeff(1, 1) == 2.0);
    CHECK(m.coeff(0, 1) == -1.0);
    CHECK(m.coeff(1, 0) == -1.0);
    CHECK(m.nonZeros() == 3);
  }
  SUBCASE("upper-triangle triplets are mirrored") {
    const auto m = assemble<double>(2, {{0, 1, -1.0}});
    CHECK(m.coeff(1, 0) == -1.0);
    CHECK(m.row_indices()[0] == 1);
  }
  SUBCASE("duplicates are summed") {
    const auto m = assemble<double>(1, {{0, 0, 1.0}, {0, 0, 1.0}});
    CHECK(m.nonZeros() == 1);
    CHECK(m.coeff(0, 0) == 2.0);
  }
  SUBCASE("structural zeros are kept") {
    const auto m = assemble<double>(2, {{1, 0, 1.0}, {0, 1, -1.0}});
    CHECK(m.nonZeros() == 1);
    CHECK(m.coeff(1, 0) == 0.0);
  }
  SUBCASE("empty triplets give the zero matrix") {
    const auto m = assemble<double>(4, std::vector<Triplet<double>>{});
    CHECK(m.rows() == 4);
    CHECK(m.nonZeros() == 0);
    CHECK(matvec(m, Eigen::VectorXd::Ones(4)).isZero());
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(assemble<double>(2, {{2, 0, 1.0}}), std::out_of_range);
    CHECK_THROWS_AS(assemble<double>(2, {{0, -1, 1.0}}), std::out_of_range);
  }
  SUBCASE("raw constructor rejects upper-triangle rows") {
    CHECK_THROWS_AS(SparseMatrixd(2, {0, 1, 2}, {0, 0}, {1.0, 1.0}), std::invalid_argument);
  }
  SUBCASE("linear combination on the union pattern") {
    const auto a = assemble<double>(3, {{0, 0, 1.0}, {2, 0, 4.0}});
    const auto b = assemble<double>(3, {{1, 1, 2.0}, {2, 0, 1.0}});
    const auto c = linear_combination(2.0, a, -1.0, b);
    CHECK(c.coeff(0, 0) == 2.0);
    CHECK(c.coeff(1, 1) == -2.0);
    CHECK(c.coeff(0, 2) == 7.0);
  }
}

TEST_CASE("matvec") {
  CHECK(matvec(SparseMatrixd(3), Eigen::VectorXd::Constant(3, 5.0)).isZero());
  const auto m = assemble<double>(2, {{0, 0, 2.0}, {1, 1, 2.0}, {1, 0, -1.0}});
  CHECK(matvec(m, Eigen::Vector2d(1, 1)) == Eigen::Vector2d(1, 1));
  Eigen::VectorXd expected(5);
  expected << 1, 0, 0, 0, 1;
  CHECK(matvec(tridiagonal(5), Eigen::VectorXd::Ones(5)) == expected);
  CHECK_THROWS_AS(matvec(m, Eigen::VectorXd::Ones(3)), std::invalid_argument);

  // against a dense product of the expanded matrix
  const auto r = random_spd(40, 0.5, 3);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(40, -1.0, 2.0);
  CHECK(rel_inf(matvec(r, x), Eigen::MatrixXd(to_eigen(r)) * x) < 1e-14);
}

TEST_CASE("ordering") {
  SUBCASE("results are permutations") {
    const auto m = random_spd(60, 1.0, 9);
    CHECK(is_permutation_of_range(compute_ordering(m)));
    CHECK(compute_ordering(m, OrderingMethod::identity) == identity_ordering(60));
  }
  SUBCASE("diagonal matrix: factor nnz = n") {
    std::vector<Triplet<double>> t;
    for (int i = 0; i < 7; ++i) t.emplace_back(i, i, 1.0 + i);
    const auto d = assemble<double>(7, t);
    CHECK(factorize(d).nonZeros() == 7);
  }
  SUBCASE("tridiagonal: no fill either way") {
    const auto m = tridiagonal(30);
    CHECK(factorize(m, OrderingMethod::identity).nonZeros() == m.nonZeros());
    CHECK(factorize(m, OrderingMethod::minimum_degree).nonZeros() == m.nonZeros());
  }
  SUBCASE("32x32 grid Laplacian: minimum degree fills no more than identity") {
    const auto m = grid_laplacian_plus_identity(32);
    const auto natural = factorize(m, OrderingMethod::identity).nonZeros();
    const auto md = factorize(m, OrderingMethod::minimum_degree).nonZeros();
    MESSAGE("identity nnz(L) = " << natural << ", minimum degree nnz(L) = " << md);
    CHECK(md <= natural);
  }
}

TEST_CASE("factorize") {
  SUBCASE("2x2 hand Cholesky") {
    const auto m = assemble<double>(2, {{0, 0, 2.0}, {1, 1, 2.0}, {1, 0, -1.0}});
    const auto f = factorize(m, identity_ordering(2));
    REQUIRE(f.nonZeros() == 3);
    CHECK(f.values()[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(f.values()[1] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(f.values()[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
    CHECK(f.row_indices()[1] == 1);
  }
  SUBCASE("identity") {
    std::vector<Triplet<double>> t;
    for (int i = 0; i < 4; ++i) t.emplace_back(i, i, 1.0);
    const auto f = factorize(assemble<double>(4, t));
    for (double v : f.values()) CHECK(v == 1.0);
    const Eigen::Vector4d b(1, -2, 3, 0.5);
    CHECK(f.solve(b) == b);
  }
  SUBCASE("indefinite matrix fails at column 1") {
    const auto m = assemble<double>(2, {{0, 0, 1.0}, {1, 1, 1.0}, {1, 0, 2.0}});
    try {
      factorize(m, identity_ordering(2));
      FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
      CHECK(e.column() == 1);
    }
  }
  SUBCASE("singular semidefinite matrix is rejected") {
    const auto m = assemble<double>(2, {{0, 0, 1.0}, {1, 1, 1.0}, {1, 0, -1.0}});
    CHECK_THROWS_AS(factorize(m, identity_ordering(2)), FactorizationError);
  }
  SUBCASE("bad ordering") {
    CHECK_THROWS_AS(factorize(tridiagonal(3), Permutation{0, 0, 1}), std::invalid_argument);
  }
  SUBCASE("P M P^T = L L^T on random SPD matrices") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto m = random_spd(30 + 10 * static_cast<int>(seed), 0.1, seed);
      for (auto method : {OrderingMethod::identity, OrderingMethod::minimum_degree}) {
        const auto perm = compute_ordering(m, method);
        const auto f = factorize(m, perm);
        const Eigen::MatrixXd pmp = permuted_dense(m, perm);
        CHECK((llt_product(f) - pmp).norm() <= 1e-10 * pmp.norm());
      }
    }
  }
  SUBCASE("elimination tree parents point upward") {
    const auto f = factorize(random_spd(80, 1.0, 4));
    for (int j = 0; j < f.rows(); ++j) {
      const int p = f.elimination_tree()[j];
      CHECK((p == -1 || p > j));
    }
  }
}

TEST_CASE("solve") {
  SUBCASE("2x2") {
    const auto m = assemble<double>(2, {{0, 0, 2.0}, {1, 1, 2.0}, {1, 0, -1.0}});
    const auto x = solve(factorize(m), Eigen::VectorXd(Eigen::Vector2d(1, 0)));
    CHECK(x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("random 50x50 graph Laplacian + I recovers ones") {
    const auto m = random_spd(50, 1.0, 50);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(50);
    CHECK(rel_inf(factorize(m).solve(matvec(m, ones)), ones) < 1e-8);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(factorize(tridiagonal(4)).solve(Eigen::VectorXd::Ones(3)), std::invalid_argument);
  }
  SUBCASE("residual property over random systems (n <= 200)") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> size(5, 200);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = size(rng);
      const auto m = random_spd(n, 1e-3, rng());
      Eigen::VectorXd b(n);
      for (int i = 0; i < n; ++i) b[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
      const auto fmd = factorize(m, OrderingMethod::minimum_degree);
      const auto fid = factorize(m, OrderingMethod::identity);
      const Eigen::VectorXd x = fmd.solve(b);
      CHECK(rel_inf(matvec(m, x), b) < 1e-8);
      CHECK(rel_inf(fid.solve(b), x) < 1e-10);
    }
  }
  SUBCASE("agrees with Eigen's simplicial LLT") {
    const auto m = grid_laplacian_plus_identity(20);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(m.rows(), 0.0, 1.0);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> reference(to_eigen(m));
    CHECK(rel_inf(factorize(m).solve(b), reference.solve(b)) < 1e-12);
  }
  SUBCASE("many right-hand sides trigger no factorization") {
    const auto m = random_spd(100, 0.5, 8);
    const auto f = factorize(m);
    const long before = instrumentation::factorizations();
    for (int k = 0; k < 20; ++k) f.solve(Eigen::VectorXd::Unit(100, k));
    CHECK(instrumentation::factorizations() == before);
    CHECK(f.nonZeros() == factorize(m).nonZeros());
  }
  SUBCASE("concurrent solves against one factor") {
    const auto m = grid_laplacian_plus_identity(24);
    const auto f = factorize(m);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(m.rows(), -1.0, 1.0);
    const Eigen::VectorXd expected = f.solve(b);
    std::vector<Eigen::VectorXd> results(4);
    std::vector<std::thread> threads;
    for (int k = 0; k < 4; ++k) threads.emplace_back([&, k] { results[k] = f.solve(b); });
    for (auto& t : threads) t.join();
    for (const auto& r : results) CHECK(r == expected);
  }
}

TEST_CASE("Matrix Market dump") {
  const auto m = random_spd(12, 0.25, 2);
  std::stringstream ss;
  write_matrix_market(ss, m);
  CHECK(ss.str().rfind("%%MatrixMarket matrix coordinate real symmetric\n12 12 ", 0) == 0);
  const auto back = read_matrix_market<double>(ss);
  CHECK(back.nonZeros() == m.nonZeros());
  CHECK(Eigen::MatrixXd(to_eigen(back)) == Eigen::MatrixXd(to_eigen(m)));
}
