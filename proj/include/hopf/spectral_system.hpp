#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hopf/common.hpp"
#include "hopf/contour.hpp"

namespace hopf {

enum class End { minus, plus };

using CoefficientFn = std::function<MatrixXcd(cplx lambda, double xi)>;
using AsymptoticFn = std::function<MatrixXcd(cplx lambda)>;
/// lambda -> (eigenvalue, eigenvector), holomorphic in lambda.
using EigenFormula = std::function<std::pair<cplx, VectorXcd>(cplx lambda)>;

/// Non-autonomous linear eigenvalue system Y' = A(lambda, xi) Y on C^n whose
/// coefficient approaches A_{-inf}(lambda) / A_{+inf}(lambda) like exp(-a |xi|).
/// Instances are immutable and the callables must be reentrant.
struct SpectralProblem {
  std::string label;
  int n = 0;
  int k = 0;  // unstable dimension of both asymptotic matrices
  CoefficientFn coefficient;
  AsymptoticFn asym_minus;
  AsymptoticFn asym_plus;
  double decay_rate = 1.0;
  /// Closed-form unstable eigenpairs at each end, when known (k = 1 only).
  EigenFormula unstable_minus;
  EigenFormula unstable_plus;
  /// Window half-width used when the caller does not pick one.
  std::optional<double> preferred_half_window;

  MatrixXcd asymptotic(cplx lambda, End end) const {
    return end == End::minus ? asym_minus(lambda) : asym_plus(lambda);
  }
};

/// Linearisation p'' + c p' + F(U(xi)) p = lambda p of a reaction-diffusion
/// system about a travelling wave U.
struct ReactionDiffusionSpec {
  std::string label = "reaction_diffusion";
  int m = 1;
  std::function<Eigen::VectorXd(double xi)> wave;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd& u)> jacobian;
  double speed = 0.0;
  double decay_rate = 1.0;
  /// U(-inf), U(+inf). Evaluated far out along the wave when absent.
  std::optional<Eigen::VectorXd> limit_minus;
  std::optional<Eigen::VectorXd> limit_plus;
};

/// A(lambda, xi) = [[0, I], [lambda I - F(U(xi)), -c I]], n = 2m, k = m.
SpectralProblem assemble_rd_system(const ReactionDiffusionSpec& spec);

/// Half-width L with exp(-a L) < 1e-8, or the problem's preferred window.
double default_half_window(const SpectralProblem& problem);

struct SplittingReport {
  std::vector<int> k_minus;
  std::vector<int> k_plus;
  double min_spectral_gap = 0.0;
  bool ok = false;
  std::string detail;  // first failing sample, if any
};

inline constexpr double kDefaultGapTol = 1e-6;

SplittingReport check_splitting(const SpectralProblem& problem, const Contour& contour,
                                double gap_tol = kDefaultGapTol);

/// Eigenvalues of A_{end}(lambda) sorted by decreasing real part.
std::vector<cplx> asymptotic_spectrum(const SpectralProblem& problem, cplx lambda, End end);

/// Sum of the eigenvalues of A_{end}(lambda) with positive real part. Throws a
/// splitting error if one lies within gap_tol of the imaginary axis or the
/// count differs from problem.k.
cplx unstable_sum(const SpectralProblem& problem, cplx lambda, End end,
                  double gap_tol = kDefaultGapTol);

/// Sum of the n - k eigenvalues with negative real part.
cplx stable_sum(const SpectralProblem& problem, cplx lambda, End end,
                double gap_tol = kDefaultGapTol);

/// Eigenvalue of largest real part at the given end.
cplx top_eigenvalue(const SpectralProblem& problem, cplx lambda, End end);

/// Max over both ends of |A(lambda, +-L) - A_{+-inf}(lambda)| with
/// L = 2/a log(1/tol); of order tol^2 when the decay hypothesis holds.
double asymptotic_defect(const SpectralProblem& problem, cplx lambda, double tol);

/// Relative Cauchy-Riemann residual of A(., xi) at lambda by central differences.
double cauchy_riemann_residual(const SpectralProblem& problem, cplx lambda, double xi,
                               double h = 1e-4);

/// Natural-ordering pchip interpolant of a sampled scalar profile; constant
/// extrapolation outside the samples.
std::function<double(double)> interpolate_profile(std::vector<double> xi,
                                                  std::vector<double> values);

/// Reads a two-column (xi, U) CSV. A non-numeric first line is skipped as a header.
std::pair<std::vector<double>, std::vector<double>> read_profile_csv(const std::string& path);

// Built-in problems.

/// u_t = u_xx + u(u^2 - 1) about the standing pulse sqrt(2) sech(xi).
SpectralProblem make_bistable();

/// Two uncoupled copies of the bistable pulse: n = 4, k = 2.
SpectralProblem make_bistable_pair();

/// Nagumo front U = 1 / (1 + exp(-xi / sqrt 2)) of f(u) = u (1 - u)(u - a),
/// speed sqrt(2)(a - 1/2). Asymptotic matrices differ at the two ends.
SpectralProblem make_nagumo_front(double a = 0.25);

std::vector<std::string> registered_problems();

/// Looks up a built-in problem by name; configuration error if unknown.
SpectralProblem find_problem(const std::string& name);

}  // namespace hopf
