#pragma once

#include <string>
#include <vector>

#include "hopf/common.hpp"
#include "hopf/contour.hpp"
#include "hopf/spectral_system.hpp"

namespace hopf {

enum class PathMode {
  top_eigenvector,  // eigenvector of the largest-real-part eigenvalue, in C^n
  unstable_wedge,   // wedge of the k unstable eigenvectors, in Lambda^k(C^n)
  stable_wedge,     // wedge of the n - k stable eigenvectors, in Lambda^(n-k)(C^n)
};

/// Loop of unit eigenvectors (or subspace wedges) of an asymptotic matrix over
/// a contour. Vectors are normalised by positive real scalars only, so the
/// fibre coordinate of the underlying holomorphic loop is preserved.
struct EigenPath {
  std::vector<cplx> lambdas;
  std::vector<VectorXcd> vectors;
  std::vector<cplx> values;  // eigenvalue, or the k-sum in wedge modes
  double closure_defect = 0.0;
  End end = End::minus;
  PathMode mode = PathMode::top_eigenvector;
  int degenerate_scaling = 0;  // p when vectors were multiplied by lambda^p

  std::size_t size() const noexcept { return vectors.size(); }
  /// Dimension of the phase space the vectors live in.
  int dim() const { return vectors.empty() ? 0 : static_cast<int>(vectors.front().size()); }
};

struct EigenPathOptions {
  double closure_tol = 1e-6;
  /// Bound on |X_{j+1} - X_j|; <= 0 means 10 * 2 pi / N.
  double step_tol = 0.0;
  double residual_tol = 1e-8;
  double condition_limit = 1e8;
};

/// Evaluates a holomorphic eigenpair formula at every sample. Each vector must
/// be an eigenvector of A_{end}(lambda) (validation error otherwise).
EigenPath eigenpath_closed_form(const SpectralProblem& problem, const Contour& contour,
                                const EigenFormula& formula, End end,
                                const EigenPathOptions& options = {});

/// Continues an eigenvector / invariant-subspace frame around the contour by
/// applying the spectral projector at lambda_{j+1} to the state at lambda_j.
/// The transported loop is the restriction of a holomorphic nowhere-zero
/// section, so its closure defect is small unless the eigenvalue cluster is
/// degenerate on or inside the contour.
EigenPath eigenpath_continuation(const SpectralProblem& problem, const Contour& contour, End end,
                                 PathMode mode, const EigenPathOptions& options = {});

/// Multiplies every vector by lambda^p and renormalises by its real norm.
EigenPath scale_path(const EigenPath& path, int power);

/// Largest |A X - mu X| over the path (induced matrices in wedge modes).
double eigen_residual(const SpectralProblem& problem, const EigenPath& path);

/// Largest angle between neighbouring rays span(X_j), span(X_{j+1}).
double max_ray_step(const EigenPath& path);

/// Rows s, lambda_re, lambda_im, Re/Im of every coordinate.
void write_path_csv(const std::string& filename, const std::vector<cplx>& lambdas,
                    const std::vector<VectorXcd>& vectors);

}  // namespace hopf
