#include "hopf/phase.hpp"

#include <cmath>
#include <sstream>

#include "hopf/io.hpp"

namespace hopf {

namespace {

void check_loop(const LoopOfVectors& loop) {
  if (loop.size() < 2) throw Error(ErrorKind::input_shape, "loop needs at least two samples");
  const Eigen::Index d = loop.vectors.front().size();
  for (const auto& v : loop.vectors) {
    if (v.size() != d) throw Error(ErrorKind::input_shape, "loop vectors differ in length");
  }
}

cplx overlap(const LoopOfVectors& loop, std::size_t j, const PhaseOptions& options) {
  const std::size_t n = loop.size();
  const cplx c = inner(loop.vectors[(j + 1) % n], loop.vectors[j]);
  if (std::abs(c) <= options.min_overlap || std::abs(std::arg(c)) >= options.increment_limit) {
    std::ostringstream os;
    os << "loop under-resolved between samples " << j << " and " << (j + 1) % n
       << " (overlap " << std::abs(c) << ", increment " << std::arg(c) << "); raise N";
    throw Error(ErrorKind::resolution, os.str());
  }
  return c;
}

}  // namespace

LoopOfVectors make_loop(std::vector<cplx> lambdas, std::vector<VectorXcd> vectors,
                        LoopSource source) {
  if (lambdas.size() != vectors.size()) {
    throw Error(ErrorKind::input_shape, "loop lambdas and vectors differ in count");
  }
  for (auto& v : vectors) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorKind::numerical, "loop vector is zero or non-finite");
    }
    v /= norm;
  }
  return {std::move(lambdas), std::move(vectors), source};
}

LoopOfVectors loop_from_path(const EigenPath& path) {
  return make_loop(path.lambdas, path.vectors, LoopSource::eigenpath);
}

LoopOfVectors loop_from_trajectories(const std::vector<cplx>& lambdas,
                                     const std::vector<TrajectoryResult>& results) {
  std::vector<VectorXcd> vectors;
  vectors.reserve(results.size());
  for (const auto& r : results) vectors.push_back(r.final_vector);
  return make_loop(lambdas, std::move(vectors), LoopSource::propagated);
}

double geometric_phase(const LoopOfVectors& loop, const PhaseOptions& options) {
  check_loop(loop);
  double sum = 0.0;
  for (std::size_t j = 0; j < loop.size(); ++j) sum += std::arg(overlap(loop, j, options));
  return sum / kTwoPi;
}

double finite_difference_phase(const LoopOfVectors& loop, const PhaseOptions& options) {
  check_loop(loop);
  const std::size_t n = loop.size();
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    overlap(loop, j, options);
    const VectorXcd tangent = 0.5 * (loop.vectors[(j + 1) % n] - loop.vectors[(j + n - 1) % n]);
    sum += inner(tangent, loop.vectors[j]).imag();
  }
  return sum / kTwoPi;
}

PhaseEstimate make_estimate(double value, double winding_tol) {
  PhaseEstimate e;
  e.value = value;
  e.count = std::lround(value);
  e.residual = std::abs(value - static_cast<double>(e.count));
  e.quantized = e.residual < winding_tol;
  return e;
}

double induced_phase_winding(const LoopOfVectors& loop, const EigenPath& reference,
                             double ray_tol) {
  check_loop(loop);
  if (reference.size() != loop.size()) {
    throw Error(ErrorKind::input_shape, "loop and reference have different sample counts");
  }
  const std::size_t n = loop.size();
  std::vector<cplx> zeta(n);
  for (std::size_t j = 0; j < n; ++j) {
    const VectorXcd x = reference.vectors[j] / reference.vectors[j].norm();
    if (x.size() != loop.vectors[j].size()) {
      throw Error(ErrorKind::input_shape, "loop and reference dimensions differ");
    }
    zeta[j] = inner(loop.vectors[j], x);
    const double misalignment = std::asin(std::min(1.0, (loop.vectors[j] - zeta[j] * x).norm()));
    if (misalignment > ray_tol) {
      std::ostringstream os;
      os << "loop not aligned with the reference ray at sample " << j << " (angle "
         << misalignment << "); increase xi1";
      throw Error(ErrorKind::not_converged, os.str());
    }
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += std::arg(zeta[(j + 1) % n] / zeta[j]);
  return sum / kTwoPi;
}

std::optional<double> find_transition(const std::vector<double>& xi_grid,
                                      const std::vector<double>& phase) {
  if (phase.empty()) return std::nullopt;
  const double target = std::round(phase.back());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (std::abs(phase[i] - target) < 0.1) return xi_grid[i];
  }
  return std::nullopt;
}

PhaseTrace phase_trace(const SpectralProblem& problem, const EigenPath& path,
                       PropagationConfig config, const std::vector<double>& xi_grid,
                       const PhaseOptions& options) {
  if (xi_grid.empty()) throw Error(ErrorKind::configuration, "empty xi grid");
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    if (i > 0 && !(xi_grid[i] > xi_grid[i - 1])) {
      throw Error(ErrorKind::configuration, "xi grid must be increasing");
    }
    if (!(xi_grid[i] > config.xi0)) {
      throw Error(ErrorKind::configuration, "xi grid must lie above xi0");
    }
  }
  config.xi1 = xi_grid.back();
  config.record_at = xi_grid;
  const auto basis = basis_for(problem, path);
  const auto results = batch_propagate(problem, path, config, basis ? &*basis : nullptr);

  PhaseTrace trace;
  trace.xi_grid = xi_grid;
  trace.phase.resize(xi_grid.size());
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    std::vector<VectorXcd> vectors;
    vectors.reserve(results.size());
    for (const auto& r : results) vectors.push_back(r.samples.at(i).direction);
    const auto loop = make_loop(path.lambdas, std::move(vectors), LoopSource::propagated);
    trace.phase[i] = geometric_phase(loop, options);
  }
  trace.transition_xi = find_transition(trace.xi_grid, trace.phase);
  return trace;
}

void write_trace_csv(const std::string& filename, const PhaseTrace& trace) {
  CsvWriter csv(filename, {"xi1", "phase"});
  for (std::size_t i = 0; i < trace.xi_grid.size(); ++i) {
    csv << trace.xi_grid[i] << trace.phase[i];
    csv.end_row();
  }
}

void write_loop_csv(const std::string& filename, const LoopOfVectors& loop) {
  write_path_csv(filename, loop.lambdas, loop.vectors);
}

}  // namespace hopf
