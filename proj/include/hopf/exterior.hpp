#pragma once

#include <span>
#include <vector>

#include "hopf/common.hpp"

namespace hopf {

/// Coordinates of the k-th exterior power of C^n. Basis k-forms
/// e_{i1} ^ ... ^ e_{ik} with i1 < ... < ik are ordered lexicographically, so
/// for n = 4, k = 2 the order is (12),(13),(14),(23),(24),(34).
class WedgeBasis {
 public:
  WedgeBasis(int n, int k);

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  int dim() const noexcept { return static_cast<int>(subsets_.size()); }

  /// Zero-based, strictly increasing index tuple of coordinate `i`.
  const std::vector<int>& subset(int i) const { return subsets_.at(i); }

  /// Coordinate of a strictly increasing zero-based tuple, or -1.
  int index_of(std::span<const int> subset) const;

  bool operator==(const WedgeBasis& other) const noexcept {
    return n_ == other.n_ && k_ == other.k_;
  }

 private:
  int n_;
  int k_;
  std::vector<std::vector<int>> subsets_;
};

long binomial(int n, int k);

struct WedgeVector {
  int n = 0;
  int k = 0;
  VectorXcd coords;
};

/// v_1 ^ ... ^ v_k. Coordinate S is the k x k minor of rows S of [v_1 ... v_k].
WedgeVector wedge(std::span<const VectorXcd> factors, const WedgeBasis& basis);

/// Same, with the factors as the columns of an n x k matrix.
WedgeVector wedge(const MatrixXcd& frame, const WedgeBasis& basis);

/// <<x, y>>_k = det( <x_i, y_j> ), the Gram determinant of the two factor lists.
cplx wedge_inner_product(std::span<const VectorXcd> x, std::span<const VectorXcd> y);

/// Matrix of the derivation A^(k) on Lambda^k:
/// A^(k) (Y_1 ^ ... ^ Y_k) = sum_j Y_1 ^ ... ^ A Y_j ^ ... ^ Y_k.
MatrixXcd induced_matrix(const MatrixXcd& a, const WedgeBasis& basis);

/// Top-degree pairing Lambda^k x Lambda^(n-k) -> Lambda^n = C, i.e. the single
/// coordinate of x ^ y.
cplx wedge_pairing(const VectorXcd& x, const WedgeBasis& bx, const VectorXcd& y,
                   const WedgeBasis& by);

/// Residual of the Plucker relation p12 p34 - p13 p24 + p14 p23 for a vector of
/// Lambda^2(C^4), scaled by |p|^2. Zero exactly on decomposable 2-vectors.
double plucker_residual(const VectorXcd& p);

/// Determinant for small square matrices; closed forms up to 3 x 3.
cplx small_det(const MatrixXcd& m);

}  // namespace hopf
