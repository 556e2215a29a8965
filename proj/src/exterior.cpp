#include "hopf/exterior.hpp"

#include <algorithm>
#include <numeric>

namespace hopf {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace {

void enumerate(int n, int k, int start, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    enumerate(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Sign of the permutation that sorts `v` (entries distinct).
int sort_sign(std::vector<int>& v) {
  int sign = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && v[j - 1] > v[j]; --j) {
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  }
  return sign;
}

}  // namespace

WedgeBasis::WedgeBasis(int n, int k) : n_(n), k_(k) {
  if (n < 1 || k < 1 || k > n) {
    throw Error(ErrorKind::input_shape, "wedge basis needs 1 <= k <= n, got n=" +
                                            std::to_string(n) + " k=" + std::to_string(k));
  }
  std::vector<int> cur;
  enumerate(n, k, 0, cur, subsets_);
}

int WedgeBasis::index_of(std::span<const int> subset) const {
  if (static_cast<int>(subset.size()) != k_) return -1;
  // Lexicographic rank of a combination.
  long rank = 0;
  int prev = -1;
  for (int pos = 0; pos < k_; ++pos) {
    const int c = subset[pos];
    if (c <= prev || c >= n_) return -1;
    for (int skipped = prev + 1; skipped < c; ++skipped) {
      rank += binomial(n_ - skipped - 1, k_ - pos - 1);
    }
    prev = c;
  }
  return static_cast<int>(rank);
}

cplx small_det(const MatrixXcd& m) {
  switch (m.rows()) {
    case 0:
      return 1.0;
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.partialPivLu().determinant();
  }
}

WedgeVector wedge(const MatrixXcd& frame, const WedgeBasis& basis) {
  if (frame.rows() != basis.n() || frame.cols() != basis.k()) {
    throw Error(ErrorKind::input_shape, "wedge: expected " + std::to_string(basis.k()) +
                                            " factors of length " + std::to_string(basis.n()));
  }
  WedgeVector out{basis.n(), basis.k(), VectorXcd(basis.dim())};
  MatrixXcd minor(basis.k(), basis.k());
  for (int i = 0; i < basis.dim(); ++i) {
    const auto& rows = basis.subset(i);
    for (int r = 0; r < basis.k(); ++r) minor.row(r) = frame.row(rows[r]);
    out.coords(i) = small_det(minor);
  }
  return out;
}

WedgeVector wedge(std::span<const VectorXcd> factors, const WedgeBasis& basis) {
  if (static_cast<int>(factors.size()) != basis.k()) {
    throw Error(ErrorKind::input_shape, "wedge: expected " + std::to_string(basis.k()) +
                                            " factors, got " + std::to_string(factors.size()));
  }
  MatrixXcd frame(basis.n(), basis.k());
  for (int j = 0; j < basis.k(); ++j) {
    if (factors[j].size() != basis.n()) {
      throw Error(ErrorKind::input_shape, "wedge: factor length mismatch");
    }
    frame.col(j) = factors[j];
  }
  return wedge(frame, basis);
}

cplx wedge_inner_product(std::span<const VectorXcd> x, std::span<const VectorXcd> y) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorKind::input_shape, "wedge_inner_product: factor counts differ");
  }
  const auto n = x.front().size();
  const auto k = static_cast<Eigen::Index>(x.size());
  MatrixXcd gram(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (x[i].size() != n || y[j].size() != n) {
        throw Error(ErrorKind::input_shape, "wedge_inner_product: factor length mismatch");
      }
      gram(i, j) = inner(x[i], y[j]);
    }
  }
  return small_det(gram);
}

MatrixXcd induced_matrix(const MatrixXcd& a, const WedgeBasis& basis) {
  const int n = basis.n();
  const int k = basis.k();
  if (a.rows() != n || a.cols() != n) {
    throw Error(ErrorKind::input_shape, "induced_matrix: matrix is " +
                                            std::to_string(a.rows()) + "x" +
                                            std::to_string(a.cols()) + ", basis has n=" +
                                            std::to_string(n));
  }
  if (k == 1) return a;
  const int d = basis.dim();
  MatrixXcd out = MatrixXcd::Zero(d, d);
  std::vector<int> tuple(k);
  for (int col = 0; col < d; ++col) {
    const auto& subset = basis.subset(col);
    for (int pos = 0; pos < k; ++pos) {
      const int replaced = subset[pos];
      for (int r = 0; r < n; ++r) {
        // e_r replaces e_replaced in slot pos; repeats vanish.
        bool repeat = false;
        for (int q = 0; q < k; ++q) {
          if (q != pos && subset[q] == r) repeat = true;
        }
        if (repeat) continue;
        const cplx coeff = a(r, replaced);
        if (coeff == cplx{0.0, 0.0}) continue;
        tuple = subset;
        tuple[pos] = r;
        const int sign = sort_sign(tuple);
        out(basis.index_of(tuple), col) += static_cast<double>(sign) * coeff;
      }
    }
  }
  return out;
}

cplx wedge_pairing(const VectorXcd& x, const WedgeBasis& bx, const VectorXcd& y,
                   const WedgeBasis& by) {
  if (bx.n() != by.n() || bx.k() + by.k() != bx.n() || x.size() != bx.dim() ||
      y.size() != by.dim()) {
    throw Error(ErrorKind::input_shape, "wedge_pairing: degrees must sum to n");
  }
  const int n = bx.n();
  cplx total = 0.0;
  std::vector<int> complement;
  std::vector<int> joined;
  for (int i = 0; i < bx.dim(); ++i) {
    const auto& s = bx.subset(i);
    complement.clear();
    for (int r = 0, p = 0; r < n; ++r) {
      if (p < bx.k() && s[p] == r) {
        ++p;
      } else {
        complement.push_back(r);
      }
    }
    joined = s;
    joined.insert(joined.end(), complement.begin(), complement.end());
    const int sign = sort_sign(joined);
    total += static_cast<double>(sign) * x(i) * y(by.index_of(complement));
  }
  return total;
}

double plucker_residual(const VectorXcd& p) {
  if (p.size() != 6) {
    throw Error(ErrorKind::input_shape, "plucker_residual: expects a vector of Lambda^2(C^4)");
  }
  const cplx q = p(0) * p(5) - p(1) * p(4) + p(2) * p(3);
  return std::abs(q) / p.squaredNorm();
}

}  // namespace hopf
