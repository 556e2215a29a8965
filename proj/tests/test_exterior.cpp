#include <doctest.h>

#include <algorithm>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "hopf/exterior.hpp"

using namespace hopf;

namespace {

MatrixXcd random_matrix(int rows, int cols, std::mt19937& rng) {
  std::normal_distribution<double> g;
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  }
  return m;
}

// Determinant by the permutation expansion.
cplx leibniz_det(const MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  cplx sum = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    }
    cplx term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= m(i, perm[i]);
    sum += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

MatrixXcd rows_of(const MatrixXcd& m, const std::vector<int>& rows) {
  MatrixXcd out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

std::vector<VectorXcd> columns(const MatrixXcd& m) {
  std::vector<VectorXcd> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m.col(c));
  return out;
}

}  // namespace

TEST_SUITE("exterior") {
  TEST_CASE("binomial coefficients") {
    CHECK(binomial(4, 2) == 6);
    CHECK(binomial(6, 3) == 20);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(5, 5) == 1);
    CHECK(binomial(3, 4) == 0);
  }

  TEST_CASE("basis order is lexicographic") {
    const WedgeBasis b(4, 2);
    CHECK(b.dim() == 6);
    const std::vector<std::vector<int>> expected = {{0, 1}, {0, 2}, {0, 3},
                                                    {1, 2}, {1, 3}, {2, 3}};
    for (int i = 0; i < 6; ++i) {
      CHECK(b.subset(i) == expected[i]);
      CHECK(b.index_of(expected[i]) == i);
    }
    const std::vector<int> bad = {2, 1};
    CHECK(b.index_of(bad) == -1);
  }

  TEST_CASE("wedge coordinates are the k x k minors") {
    std::mt19937 rng(11);
    for (auto [n, k] : {std::pair{4, 2}, std::pair{5, 3}, std::pair{6, 4}, std::pair{3, 1}}) {
      const MatrixXcd frame = random_matrix(n, k, rng);
      const WedgeBasis b(n, k);
      const WedgeVector w = wedge(frame, b);
      const auto cols = columns(frame);
      const WedgeVector w2 = wedge(std::span<const VectorXcd>(cols), b);
      for (int i = 0; i < b.dim(); ++i) {
        const cplx minor = leibniz_det(rows_of(frame, b.subset(i)));
        CHECK(std::abs(w.coords(i) - minor) < 1e-12);
        CHECK(std::abs(w2.coords(i) - minor) < 1e-12);
      }
    }
  }

  TEST_CASE("repeated factor gives the zero wedge exactly") {
    std::mt19937 rng(3);
    MatrixXcd frame = random_matrix(4, 2, rng);
    frame.col(1) = frame.col(0);
    CHECK(wedge(frame, WedgeBasis(4, 2)).coords.norm() == 0.0);
  }

  TEST_CASE("wedge inner product obeys Cauchy-Binet") {
    std::mt19937 rng(5);
    const int n = 5;
    const int k = 3;
    const MatrixXcd x = random_matrix(n, k, rng);
    const MatrixXcd y = random_matrix(n, k, rng);
    const WedgeBasis b(n, k);
    cplx oracle = 0.0;
    for (int i = 0; i < b.dim(); ++i) {
      oracle += leibniz_det(rows_of(x, b.subset(i))) *
                std::conj(leibniz_det(rows_of(y, b.subset(i))));
    }
    const auto xs = columns(x);
    const auto ys = columns(y);
    const cplx gram = wedge_inner_product(xs, ys);
    CHECK(std::abs(gram - oracle) < 1e-10 * std::abs(oracle));
  }

  TEST_CASE("induced matrix matches the 4 x 4, k = 2 golden table") {
    MatrixXcd a(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) a(i, j) = 10.0 * (i + 1) + (j + 1);
    }
    auto e = [&](int i, int j) { return a(i - 1, j - 1); };
    MatrixXcd table(6, 6);
    table << e(1, 1) + e(2, 2), e(2, 3), e(2, 4), -e(1, 3), -e(1, 4), 0.0,
        e(3, 2), e(1, 1) + e(3, 3), e(3, 4), e(1, 2), 0.0, -e(1, 4),
        e(4, 2), e(4, 3), e(1, 1) + e(4, 4), 0.0, e(1, 2), e(1, 3),
        -e(3, 1), e(2, 1), 0.0, e(2, 2) + e(3, 3), e(3, 4), -e(2, 4),
        -e(4, 1), 0.0, e(2, 1), e(4, 3), e(2, 2) + e(4, 4), e(2, 3),
        0.0, -e(4, 1), e(3, 1), -e(4, 2), e(3, 2), e(3, 3) + e(4, 4);
    const MatrixXcd induced = induced_matrix(a, WedgeBasis(4, 2));
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) CHECK(induced(i, j) == table(i, j));
    }
  }

  TEST_CASE("induced matrix is the derivation on wedges") {
    std::mt19937 rng(7);
    for (auto [n, k] : {std::pair{4, 2}, std::pair{5, 2}, std::pair{5, 3}}) {
      const MatrixXcd a = random_matrix(n, n, rng);
      const MatrixXcd frame = random_matrix(n, k, rng);
      const WedgeBasis b(n, k);
      VectorXcd expected = VectorXcd::Zero(b.dim());
      for (int j = 0; j < k; ++j) {
        MatrixXcd f = frame;
        f.col(j) = a * frame.col(j);
        expected += wedge(f, b).coords;
      }
      const VectorXcd got = induced_matrix(a, b) * wedge(frame, b).coords;
      CHECK((got - expected).norm() < 1e-11 * expected.norm());
    }
  }

  TEST_CASE("induced matrix for k = 1 is the matrix itself") {
    std::mt19937 rng(2);
    const MatrixXcd a = random_matrix(3, 3, rng);
    CHECK((induced_matrix(a, WedgeBasis(3, 1)) - a).norm() == 0.0);
  }

  TEST_CASE("eigenvalues of A^(k) are the k-sums") {
    std::mt19937 rng(13);
    const MatrixXcd a = random_matrix(4, 4, rng);
    Eigen::ComplexEigenSolver<MatrixXcd> base(a);
    Eigen::ComplexEigenSolver<MatrixXcd> induced(induced_matrix(a, WedgeBasis(4, 2)));
    std::vector<cplx> sums;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) sums.push_back(base.eigenvalues()(i) + base.eigenvalues()(j));
    }
    for (int i = 0; i < 6; ++i) {
      double best = 1e300;
      for (cplx s : sums) best = std::min(best, std::abs(induced.eigenvalues()(i) - s));
      CHECK(best < 1e-8);
    }
  }

  TEST_CASE("pairing of two wedges is the determinant of the joined frame") {
    std::mt19937 rng(17);
    for (auto [n, k] : {std::pair{2, 1}, std::pair{4, 2}, std::pair{4, 1}, std::pair{5, 2}}) {
      const MatrixXcd x = random_matrix(n, k, rng);
      const MatrixXcd y = random_matrix(n, n - k, rng);
      MatrixXcd joined(n, n);
      joined << x, y;
      const WedgeBasis bx(n, k);
      const WedgeBasis by(n, n - k);
      const cplx p = wedge_pairing(wedge(x, bx).coords, bx, wedge(y, by).coords, by);
      const cplx d = leibniz_det(joined);
      CHECK(std::abs(p - d) < 1e-11 * std::max(1.0, std::abs(d)));
    }
  }

  TEST_CASE("Plucker residual separates decomposable 2-vectors") {
    std::mt19937 rng(19);
    const MatrixXcd frame = random_matrix(4, 2, rng);
    CHECK(plucker_residual(wedge(frame, WedgeBasis(4, 2)).coords) < 1e-14);
    VectorXcd p = VectorXcd::Zero(6);
    p(0) = 1.0;  // e1 ^ e2
    p(5) = 1.0;  // e3 ^ e4
    CHECK(plucker_residual(p) == doctest::Approx(0.5));
  }

  TEST_CASE("small_det agrees with the permutation expansion") {
    std::mt19937 rng(23);
    for (int n = 1; n <= 5; ++n) {
      const MatrixXcd m = random_matrix(n, n, rng);
      const cplx oracle = leibniz_det(m);
      CHECK(std::abs(small_det(m) - oracle) < 1e-11 * std::max(1.0, std::abs(oracle)));
    }
  }
}
