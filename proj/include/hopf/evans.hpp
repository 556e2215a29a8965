#pragma once

#include <string>
#include <vector>

#include "hopf/common.hpp"
#include "hopf/contour.hpp"
#include "hopf/exterior.hpp"
#include "hopf/propagation.hpp"
#include "hopf/spectral_system.hpp"

namespace hopf {

struct EvansConfig {
  double xi0 = -11.0;
  double xi1 = 11.0;
  double step = 0.01;
  Method method = Method::rk4;
  double floor_tol = 1e-8;
  double residual_tol = 0.05;
};

struct EvansSample {
  cplx lambda;
  cplx value;
};

/// D(lambda): pairing at xi = 0 of the forward-propagated unstable k-wedge
/// (started from `unstable` at xi0) and the backward-propagated stable
/// (n-k)-wedge (started from `stable` at xi1). Both factors are unit vectors.
cplx evans_value(const SpectralProblem& problem, cplx lambda, const VectorXcd& unstable,
                 const VectorXcd& stable, const EvansConfig& config);

/// Same, starting from the eigenvectors of the asymptotic matrices at this
/// lambda. The gauge is arbitrary, so only |D| is meaningful.
cplx evans_value(const SpectralProblem& problem, cplx lambda, const EvansConfig& config);

/// D at every contour sample, with holomorphic initial data from continuation.
/// OpenMP-parallel over samples.
std::vector<EvansSample> evans_samples(const SpectralProblem& problem, const Contour& contour,
                                       const EvansConfig& config);

/// Serial reference for evans_samples.
std::vector<EvansSample> evans_samples_serial(const SpectralProblem& problem,
                                              const Contour& contour, const EvansConfig& config);

struct EvansWinding {
  long winding = 0;
  double raw = 0.0;
  double min_abs = 0.0;
  std::vector<EvansSample> samples;
};

/// Winding of D around 0 by summed principal arg increments. Errors:
/// contour-hits-spectrum when |D| < floor_tol, resolution when an increment
/// reaches pi/2 or the raw winding is not within residual_tol of an integer.
EvansWinding winding_of(std::vector<EvansSample> samples, const EvansConfig& config);

EvansWinding evans_winding(const SpectralProblem& problem, const Contour& contour,
                           const EvansConfig& config = {});

void write_evans_csv(const std::string& filename, const std::vector<EvansSample>& samples);

}  // namespace hopf
