#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hopf/common.hpp"
#include "hopf/eigenpath.hpp"
#include "hopf/exterior.hpp"
#include "hopf/spectral_system.hpp"

namespace hopf {

/// Drift shift subtracted from A(lambda, xi).
enum class Scaling {
  none,         // the A system
  shift_minus,  // A - mu_-(lambda) I throughout
  shift_plus,   // A - mu_+(lambda) I throughout
  gamma,        // mu_- for xi < 0, mu_+ for xi >= 0
};

enum class Method { rk4, rk45 };

struct PropagationConfig {
  double xi0 = -11.0;
  double xi1 = 11.0;
  double step = 0.01;
  Method method = Method::rk4;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int renorm_interval = 10;
  Scaling scaling = Scaling::shift_minus;
  /// Points in (xi0, xi1] at which the unit state is recorded.
  std::vector<double> record_at;

  /// Throws a configuration error when the invariants fail.
  void validate() const;
};

struct TraceSample {
  double xi = 0.0;
  VectorXcd direction;
  double log_magnitude = 0.0;
};

struct TrajectoryResult {
  VectorXcd final_vector;  // unit real norm
  double log_magnitude = 0.0;
  std::vector<TraceSample> samples;
};

using LinearDrift = std::function<MatrixXcd(double xi)>;

/// Integrates X' = M(xi) X from `from` to `to` (either direction) with
/// real-norm renormalisation; `to` and every entry of `record_at` that lies
/// between the endpoints are hit exactly.
TrajectoryResult integrate_linear(const LinearDrift& drift, const VectorXcd& init, double from,
                                  double to, const PropagationConfig& config);

/// Shift value mu(lambda) at one end: the top eigenvalue in vector mode, the
/// sum of the basis.k() leading eigenvalues in wedge mode.
cplx scaling_shift(const SpectralProblem& problem, cplx lambda, End end,
                   const WedgeBasis* basis);

/// Propagates init at lambda from xi0 to xi1 under the configured scaling. With
/// a basis the drift is the induced matrix on Lambda^k.
TrajectoryResult propagate(const SpectralProblem& problem, cplx lambda, const VectorXcd& init,
                           const PropagationConfig& config, const WedgeBasis* basis = nullptr);

/// One propagation per sample, OpenMP-parallel; output order matches input.
std::vector<TrajectoryResult> batch_propagate(const SpectralProblem& problem,
                                              std::span<const cplx> lambdas,
                                              std::span<const VectorXcd> inits,
                                              const PropagationConfig& config,
                                              const WedgeBasis* basis = nullptr);

/// Serial reference for batch_propagate.
std::vector<TrajectoryResult> batch_propagate_serial(const SpectralProblem& problem,
                                                     std::span<const cplx> lambdas,
                                                     std::span<const VectorXcd> inits,
                                                     const PropagationConfig& config,
                                                     const WedgeBasis* basis = nullptr);

std::vector<TrajectoryResult> batch_propagate(const SpectralProblem& problem,
                                              const EigenPath& path,
                                              const PropagationConfig& config,
                                              const WedgeBasis* basis = nullptr);

/// Wedge basis matching the path's coordinate dimension, or nothing for vector paths.
std::optional<WedgeBasis> basis_for(const SpectralProblem& problem, const EigenPath& path);

}  // namespace hopf
