#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hopf/common.hpp"
#include "hopf/contour.hpp"
#include "hopf/phase.hpp"
#include "hopf/propagation.hpp"

namespace hopf {

/// Boundary functional as a holomorphic function of conj(lambda).
using BoundaryFn = std::function<VectorXcd(cplx lambda_bar)>;

/// Y' = A(lambda, x) Y on 0 <= x <= 1 with n - k conditions <a_i*, Y(0)> = 0
/// and k conditions <b_i*, Y(1)> = 0.
struct BvpProblem {
  std::string label;
  int n = 0;
  int k = 0;
  std::function<MatrixXcd(cplx lambda, double x)> coefficient;
  std::vector<BoundaryFn> left;   // n - k functionals a_i*
  std::vector<BoundaryFn> right;  // k functionals b_i*
};

/// sum_j conj(eta_j) nu_j, with eta the functional already evaluated at conj(lambda).
cplx section_product(const VectorXcd& eta, const VectorXcd& nu);

/// Rows are the holomorphic vectors conj(f_i(conj lambda)), so that
/// (L(lambda) v)_i = <f_i, v>_lambda.
MatrixXcd functional_matrix(const std::vector<BoundaryFn>& family, int n, cplx lambda);

/// Largest relative d/d(conj lambda) of the holomorphic functional vectors at lambda.
double boundary_holomorphy_residual(const BvpProblem& problem, cplx lambda, double h = 1e-4);

struct BasesOptions {
  double rank_tol = 1e-8;
  double closure_tol = 1e-6;
  double holomorphy_tol = 1e-6;
};

struct BoundaryBases {
  std::vector<MatrixXcd> u0;  // n x k, annihilated by the left functionals
  std::vector<MatrixXcd> u1;  // n x k, spans the right functional vectors
  std::vector<MatrixXcd> v1;  // n x (n-k), annihilated by the right functionals
  std::vector<MatrixXcd> q;   // projector onto span(u1) along span(v1)
  std::vector<int> left_pivots;
  std::vector<int> right_pivots;
  double closure_defect = 0.0;
};

/// Fixed-pivot nullspace of the m x n matrix L: pivot columns solve for the
/// free columns, which carry the identity. Holomorphic in the entries of L.
MatrixXcd pivot_nullspace(const MatrixXcd& l, const std::vector<int>& pivots);

/// Pivot columns chosen by full-pivot LU on the first sample.
std::vector<int> choose_pivots(const MatrixXcd& l, double rank_tol);

BoundaryBases build_bases(const BvpProblem& problem, const Contour& contour,
                          const BasesOptions& options = {});

struct BvpConfig {
  double step = 1e-3;
  Method method = Method::rk4;
  /// When set, (I - weight P) is applied at x = position before the end projection.
  std::optional<std::pair<double, double>> interior_projection;
  BasesOptions bases;
  PhaseOptions phase;
};

struct BvpResult {
  PhaseEstimate estimate;
  LoopOfVectors loop;
};

/// Propagates the U0 basis from x = 0 to 1, projects with Q, wedges and
/// measures the geometric phase. OpenMP-parallel over samples.
BvpResult bvp_phase(const BvpProblem& problem, const Contour& contour,
                    const BvpConfig& config = {});

/// Serial reference for bvp_phase.
BvpResult bvp_phase_serial(const BvpProblem& problem, const Contour& contour,
                           const BvpConfig& config = {});

/// p'' = lambda p with p(0) = p(1) = 0, as Y = (p, p').
BvpProblem make_dirichlet();

std::vector<std::string> registered_bvps();
BvpProblem find_bvp(const std::string& name);

}  // namespace hopf
