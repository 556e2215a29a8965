#include "hopf/evans.hpp"

#include <cmath>
#include <sstream>

#include "hopf/eigenpath.hpp"
#include "hopf/io.hpp"

namespace hopf {

namespace {

PropagationConfig stepping(const EvansConfig& config) {
  PropagationConfig p;
  p.step = config.step;
  p.method = config.method;
  return p;
}

struct InitialData {
  std::vector<VectorXcd> unstable;
  std::vector<VectorXcd> stable;
};

InitialData initial_data(const SpectralProblem& problem, const Contour& contour) {
  InitialData data;
  data.unstable =
      eigenpath_continuation(problem, contour, End::minus, PathMode::unstable_wedge).vectors;
  data.stable =
      eigenpath_continuation(problem, contour, End::plus, PathMode::stable_wedge).vectors;
  return data;
}

VectorXcd group_wedge(const SpectralProblem& problem, cplx lambda, End end, bool unstable) {
  Eigen::ComplexEigenSolver<MatrixXcd> solver(problem.asymptotic(lambda, end));
  const int rank = unstable ? problem.k : problem.n - problem.k;
  MatrixXcd frame(problem.n, rank);
  int c = 0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    if ((solver.eigenvalues()(i).real() > 0.0) == unstable && c < rank) {
      frame.col(c++) = solver.eigenvectors().col(i);
    }
  }
  if (c != rank) throw Error(ErrorKind::splitting, "splitting fails at " + format_lambda(lambda));
  return wedge(frame, WedgeBasis(problem.n, rank)).coords;
}

}  // namespace

cplx evans_value(const SpectralProblem& problem, cplx lambda, const VectorXcd& unstable,
                 const VectorXcd& stable, const EvansConfig& config) {
  if (!(config.xi0 < 0.0 && 0.0 < config.xi1)) {
    throw Error(ErrorKind::configuration, "Evans window must satisfy xi0 < 0 < xi1");
  }
  const WedgeBasis bu(problem.n, problem.k);
  const WedgeBasis bs(problem.n, problem.n - problem.k);
  if (unstable.size() != bu.dim() || stable.size() != bs.dim()) {
    throw Error(ErrorKind::input_shape, "Evans initial wedges have the wrong dimension");
  }
  const cplx mu_u = unstable_sum(problem, lambda, End::minus);
  const cplx mu_s = stable_sum(problem, lambda, End::plus);
  const PropagationConfig p = stepping(config);
  auto drift = [&](const WedgeBasis& basis, cplx mu) -> LinearDrift {
    return [&problem, &basis, lambda, mu](double xi) {
      MatrixXcd a = induced_matrix(problem.coefficient(lambda, xi), basis);
      a.diagonal().array() -= mu;
      return a;
    };
  };
  const auto left = integrate_linear(drift(bu, mu_u), unstable, config.xi0, 0.0, p);
  const auto right = integrate_linear(drift(bs, mu_s), stable, config.xi1, 0.0, p);
  return wedge_pairing(left.final_vector, bu, right.final_vector, bs);
}

cplx evans_value(const SpectralProblem& problem, cplx lambda, const EvansConfig& config) {
  return evans_value(problem, lambda, group_wedge(problem, lambda, End::minus, true),
                     group_wedge(problem, lambda, End::plus, false), config);
}

std::vector<EvansSample> evans_samples_serial(const SpectralProblem& problem,
                                              const Contour& contour, const EvansConfig& config) {
  const InitialData data = initial_data(problem, contour);
  std::vector<EvansSample> out(contour.size());
  for (std::size_t j = 0; j < contour.size(); ++j) {
    out[j] = {contour[j],
              evans_value(problem, contour[j], data.unstable[j], data.stable[j], config)};
  }
  return out;
}

std::vector<EvansSample> evans_samples(const SpectralProblem& problem, const Contour& contour,
                                       const EvansConfig& config) {
  const InitialData data = initial_data(problem, contour);
  const long n = static_cast<long>(contour.size());
  std::vector<EvansSample> out(contour.size());
  long failed = n;
  ErrorKind kind = ErrorKind::numerical;
  std::string message;
#pragma omp parallel for schedule(dynamic, 8)
  for (long j = 0; j < n; ++j) {
    try {
      out[j] = {contour[j],
                evans_value(problem, contour[j], data.unstable[j], data.stable[j], config)};
    } catch (const Error& e) {
#pragma omp critical(hopf_evans_error)
      if (j < failed) {
        failed = j;
        kind = e.kind();
        message = e.what();
      }
    }
  }
  if (failed < n) throw Error(kind, "sample " + std::to_string(failed) + ": " + message);
  return out;
}

EvansWinding winding_of(std::vector<EvansSample> samples, const EvansConfig& config) {
  EvansWinding w;
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorKind::input_shape, "need at least two Evans samples");
  w.min_abs = std::abs(samples.front().value);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::abs(samples[j].value);
    w.min_abs = std::min(w.min_abs, a);
    if (!(a >= config.floor_tol)) {
      std::ostringstream os;
      os << "|D| = " << a << " below floor at lambda = " << format_lambda(samples[j].lambda);
      throw Error(ErrorKind::contour_hits_spectrum, os.str());
    }
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double inc = std::arg(samples[(j + 1) % n].value / samples[j].value);
    if (std::abs(inc) >= 0.5 * std::acos(-1.0)) {
      throw Error(ErrorKind::resolution, "Evans function under-resolved near lambda = " +
                                             format_lambda(samples[j].lambda) + "; raise N");
    }
    sum += inc;
  }
  w.raw = sum / kTwoPi;
  w.winding = std::lround(w.raw);
  if (std::abs(w.raw - static_cast<double>(w.winding)) >= config.residual_tol) {
    std::ostringstream os;
    os << "Evans winding " << w.raw << " is not near an integer";
    throw Error(ErrorKind::resolution, os.str());
  }
  w.samples = std::move(samples);
  return w;
}

EvansWinding evans_winding(const SpectralProblem& problem, const Contour& contour,
                           const EvansConfig& config) {
  return winding_of(evans_samples(problem, contour, config), config);
}

void write_evans_csv(const std::string& filename, const std::vector<EvansSample>& samples) {
  CsvWriter csv(filename, {"s", "d_re", "d_im"});
  const double n = static_cast<double>(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    csv << static_cast<double>(j) / n << samples[j].value.real() << samples[j].value.imag();
    csv.end_row();
  }
}

}  // namespace hopf
