#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopf/common.hpp"
#include "hopf/eigenpath.hpp"
#include "hopf/propagation.hpp"

namespace hopf {

enum class LoopSource { eigenpath, propagated, bvp, synthetic };

/// Closed loop of unit vectors over a sampled contour; entry N is entry 0.
struct LoopOfVectors {
  std::vector<cplx> lambdas;
  std::vector<VectorXcd> vectors;
  LoopSource source = LoopSource::synthetic;

  std::size_t size() const noexcept { return vectors.size(); }
};

/// Normalises every vector by its real norm.
LoopOfVectors make_loop(std::vector<cplx> lambdas, std::vector<VectorXcd> vectors,
                        LoopSource source);
LoopOfVectors loop_from_path(const EigenPath& path);
LoopOfVectors loop_from_trajectories(const std::vector<cplx>& lambdas,
                                     const std::vector<TrajectoryResult>& results);

struct PhaseOptions {
  double increment_limit = 0.78539816339744830962;  // pi / 4
  double min_overlap = 0.1;
  double winding_tol = 0.05;
};

/// (1/2 pi) sum_j arg <u_{j+1}, u_j>. Resolution error when a neighbour
/// overlap drops below min_overlap or an increment reaches increment_limit.
double geometric_phase(const LoopOfVectors& loop, const PhaseOptions& options = {});

/// (1/2 pi) sum_j Im <(u_{j+1} - u_{j-1}) / 2, u_j>.
double finite_difference_phase(const LoopOfVectors& loop, const PhaseOptions& options = {});

struct PhaseEstimate {
  double value = 0.0;
  long count = 0;         // nearest integer
  double residual = 0.0;  // |value - count|
  bool quantized = false; // residual < winding_tol
};

PhaseEstimate make_estimate(double value, double winding_tol = 0.05);

/// Winding of zeta_j = <u_j, x_j> where x is the reference path. Not-converged
/// error when some u_j is further than ray_tol (radians) from the reference ray.
double induced_phase_winding(const LoopOfVectors& loop, const EigenPath& reference,
                             double ray_tol = 1e-3);

struct PhaseTrace {
  std::vector<double> xi_grid;
  std::vector<double> phase;
  std::optional<double> transition_xi;
};

/// Geometric phase of the propagated loop at every xi1 in the grid, from a
/// single batch that records each trajectory at the grid points.
PhaseTrace phase_trace(const SpectralProblem& problem, const EigenPath& path,
                       PropagationConfig config, const std::vector<double>& xi_grid,
                       const PhaseOptions& options = {});

/// Smallest grid value whose phase is within 0.1 of the rounded final phase.
std::optional<double> find_transition(const std::vector<double>& xi_grid,
                                      const std::vector<double>& phase);

void write_trace_csv(const std::string& filename, const PhaseTrace& trace);
void write_loop_csv(const std::string& filename, const LoopOfVectors& loop);

}  // namespace hopf
