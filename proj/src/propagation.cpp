#include "hopf/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hopf {

namespace {

std::string at_xi(double xi) {
  std::ostringstream os;
  os << " at xi = " << xi;
  return os.str();
}

struct State {
  VectorXcd x;
  double log_magnitude = 0.0;
  long steps = 0;
};

void check_finite(const VectorXcd& x, double xi) {
  const double norm = x.norm();
  if (!std::isfinite(norm)) throw Error(ErrorKind::numerical, "non-finite state" + at_xi(xi));
  if (norm == 0.0) throw Error(ErrorKind::numerical, "state underflowed to zero" + at_xi(xi));
}

void renormalize(State& s) {
  const double norm = s.x.norm();
  s.log_magnitude += std::log(norm);
  s.x /= norm;
}

void count_step(State& s, const PropagationConfig& config) {
  if (++s.steps % config.renorm_interval == 0) renormalize(s);
}

void rk4_segment(const LinearDrift& f, State& s, double a, double b,
                 const PropagationConfig& config) {
  const double len = std::abs(b - a);
  if (len == 0.0) return;
  const long n = std::max(1L, static_cast<long>(std::ceil(len / config.step - 1e-9)));
  const double h = (b - a) / static_cast<double>(n);
  MatrixXcd m0 = f(a);
  for (long i = 0; i < n; ++i) {
    const double xi = a + h * static_cast<double>(i);
    const double next = i + 1 == n ? b : a + h * static_cast<double>(i + 1);
    const MatrixXcd mh = f(xi + 0.5 * h);
    MatrixXcd m1 = f(next);
    const VectorXcd k1 = m0 * s.x;
    const VectorXcd k2 = mh * (s.x + 0.5 * h * k1);
    const VectorXcd k3 = mh * (s.x + 0.5 * h * k2);
    const VectorXcd k4 = m1 * (s.x + h * k3);
    s.x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_finite(s.x, next);
    count_step(s, config);
    m0 = std::move(m1);
  }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

void rk45_segment(const LinearDrift& f, State& s, double a, double b,
                  const PropagationConfig& config, double& h_abs) {
  const double dir = b > a ? 1.0 : -1.0;
  double xi = a;
  VectorXcd k1 = f(xi) * s.x;
  while (dir * (b - xi) > 0.0) {
    double h = dir * std::min(h_abs, std::abs(b - xi));
    const double h_min = 1e-12 * std::max(1.0, std::abs(xi));
    if (std::abs(h) < h_min && std::abs(b - xi) > h_min) {
      throw Error(ErrorKind::stiffness, "adaptive step underflow" + at_xi(xi));
    }
    const VectorXcd k2 = f(xi + c2 * h) * (s.x + h * (a21 * k1));
    const VectorXcd k3 = f(xi + c3 * h) * (s.x + h * (a31 * k1 + a32 * k2));
    const VectorXcd k4 = f(xi + c4 * h) * (s.x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const VectorXcd k5 =
        f(xi + c5 * h) * (s.x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const VectorXcd k6 =
        f(xi + h) * (s.x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const VectorXcd y = s.x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double next = std::abs(b - (xi + h)) < 1e-14 * std::max(1.0, std::abs(b)) ? b : xi + h;
    const VectorXcd k7 = f(next) * y;
    const VectorXcd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double ratio = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          config.abs_tol + config.rel_tol * std::max(std::abs(s.x(i)), std::abs(y(i)));
      ratio = std::max(ratio, std::abs(err(i)) / scale);
    }
    if (!std::isfinite(ratio)) {
      h_abs *= 0.2;
      continue;
    }
    if (ratio <= 1.0) {
      xi = next;
      s.x = y;
      k1 = k7;
      check_finite(s.x, xi);
      if (++s.steps % config.renorm_interval == 0) {
        const double norm = s.x.norm();
        s.log_magnitude += std::log(norm);
        s.x /= norm;
        k1 /= norm;
      }
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h_abs = std::abs(h) * factor;
  }
}

// Integrates across segments delimited by `cuts`; drift_for(mid) supplies the
// drift valid on the segment containing mid.
TrajectoryResult integrate_piecewise(const std::function<LinearDrift(double mid)>& drift_for,
                                     const VectorXcd& init, double from, double to,
                                     std::vector<double> cuts, const PropagationConfig& config) {
  const double norm0 = init.norm();
  if (!(norm0 > 0.0) || !std::isfinite(norm0)) {
    throw Error(ErrorKind::input_shape, "initial vector must be nonzero and finite");
  }
  const double dir = to >= from ? 1.0 : -1.0;
  std::vector<double> records;
  for (double r : config.record_at) {
    if (dir * (r - from) >= 0.0 && dir * (to - r) >= 0.0) records.push_back(r);
  }
  for (double r : records) cuts.push_back(r);
  cuts.push_back(to);
  std::vector<double> points;
  for (double c : cuts) {
    if (dir * (c - from) > 0.0 && dir * (to - c) >= 0.0) points.push_back(c);
  }
  std::sort(points.begin(), points.end(), [&](double p, double q) { return dir * p < dir * q; });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::sort(records.begin(), records.end(), [&](double p, double q) { return dir * p < dir * q; });

  State s;
  s.x = init / norm0;
  s.log_magnitude = std::log(norm0);
  TrajectoryResult result;
  std::size_t next_record = 0;
  auto record = [&](double xi) {
    while (next_record < records.size() && records[next_record] == xi) {
      const double n = s.x.norm();
      result.samples.push_back({xi, s.x / n, s.log_magnitude + std::log(n)});
      ++next_record;
    }
  };
  record(from);
  double h_abs = config.step;
  double a = from;
  for (double b : points) {
    const LinearDrift drift = drift_for(0.5 * (a + b));
    if (config.method == Method::rk4) {
      rk4_segment(drift, s, a, b, config);
    } else {
      rk45_segment(drift, s, a, b, config, h_abs);
    }
    record(b);
    a = b;
  }
  renormalize(s);
  result.final_vector = std::move(s.x);
  result.log_magnitude = s.log_magnitude;
  return result;
}

cplx leading_sum(const SpectralProblem& problem, cplx lambda, End end, int count) {
  const auto spectrum = asymptotic_spectrum(problem, lambda, end);
  cplx sum = 0.0;
  for (int i = 0; i < count; ++i) sum += spectrum[i];
  return sum;
}

}  // namespace

void PropagationConfig::validate() const {
  if (!(xi0 < xi1)) throw Error(ErrorKind::configuration, "window requires xi0 < xi1");
  if (!(step > 0.0)) throw Error(ErrorKind::configuration, "step must be positive");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw Error(ErrorKind::configuration, "tolerances must be positive");
  }
  if (renorm_interval < 1) throw Error(ErrorKind::configuration, "renorm_interval must be >= 1");
  if (scaling == Scaling::gamma && !(xi0 < 0.0 && 0.0 < xi1)) {
    throw Error(ErrorKind::configuration, "gamma scaling requires xi0 < 0 < xi1");
  }
}

TrajectoryResult integrate_linear(const LinearDrift& drift, const VectorXcd& init, double from,
                                  double to, const PropagationConfig& config) {
  return integrate_piecewise([&](double) { return drift; }, init, from, to, {}, config);
}

cplx scaling_shift(const SpectralProblem& problem, cplx lambda, End end,
                   const WedgeBasis* basis) {
  if (basis == nullptr) return top_eigenvalue(problem, lambda, end);
  if (basis->k() == problem.k) return unstable_sum(problem, lambda, end);
  return leading_sum(problem, lambda, end, basis->k());
}

TrajectoryResult propagate(const SpectralProblem& problem, cplx lambda, const VectorXcd& init,
                           const PropagationConfig& config, const WedgeBasis* basis) {
  config.validate();
  const Eigen::Index dim = basis ? basis->dim() : problem.n;
  if (init.size() != dim) {
    throw Error(ErrorKind::input_shape, "initial vector has length " +
                                            std::to_string(init.size()) + ", expected " +
                                            std::to_string(dim));
  }
  if (basis && basis->n() != problem.n) {
    throw Error(ErrorKind::input_shape, "wedge basis does not match the problem dimension");
  }
  cplx mu_minus = 0.0;
  cplx mu_plus = 0.0;
  if (config.scaling == Scaling::shift_minus || config.scaling == Scaling::gamma) {
    mu_minus = scaling_shift(problem, lambda, End::minus, basis);
  }
  if (config.scaling == Scaling::shift_plus || config.scaling == Scaling::gamma) {
    mu_plus = scaling_shift(problem, lambda, End::plus, basis);
  }
  auto drift_with = [&problem, lambda, basis](cplx mu) -> LinearDrift {
    return [&problem, lambda, basis, mu](double xi) {
      MatrixXcd a = problem.coefficient(lambda, xi);
      if (basis) a = induced_matrix(a, *basis);
      a.diagonal().array() -= mu;
      return a;
    };
  };
  std::vector<double> cuts;
  if (config.scaling == Scaling::gamma) cuts.push_back(0.0);
  auto drift_for = [&](double mid) -> LinearDrift {
    switch (config.scaling) {
      case Scaling::none: return drift_with(0.0);
      case Scaling::shift_minus: return drift_with(mu_minus);
      case Scaling::shift_plus: return drift_with(mu_plus);
      case Scaling::gamma: return drift_with(mid < 0.0 ? mu_minus : mu_plus);
    }
    return drift_with(0.0);
  };
  return integrate_piecewise(drift_for, init, config.xi0, config.xi1, cuts, config);
}

std::vector<TrajectoryResult> batch_propagate_serial(const SpectralProblem& problem,
                                                     std::span<const cplx> lambdas,
                                                     std::span<const VectorXcd> inits,
                                                     const PropagationConfig& config,
                                                     const WedgeBasis* basis) {
  if (lambdas.size() != inits.size()) {
    throw Error(ErrorKind::input_shape, "lambda and initial-vector counts differ");
  }
  std::vector<TrajectoryResult> out(lambdas.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    try {
      out[j] = propagate(problem, lambdas[j], inits[j], config, basis);
    } catch (const Error& e) {
      throw Error(e.kind(), "sample " + std::to_string(j) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TrajectoryResult> batch_propagate(const SpectralProblem& problem,
                                              std::span<const cplx> lambdas,
                                              std::span<const VectorXcd> inits,
                                              const PropagationConfig& config,
                                              const WedgeBasis* basis) {
  if (lambdas.size() != inits.size()) {
    throw Error(ErrorKind::input_shape, "lambda and initial-vector counts differ");
  }
  const long n = static_cast<long>(lambdas.size());
  std::vector<TrajectoryResult> out(lambdas.size());
  long failed = n;
  ErrorKind kind = ErrorKind::numerical;
  std::string message;
#pragma omp parallel for schedule(dynamic, 8)
  for (long j = 0; j < n; ++j) {
    try {
      out[j] = propagate(problem, lambdas[j], inits[j], config, basis);
    } catch (const Error& e) {
#pragma omp critical(hopf_batch_error)
      if (j < failed) {
        failed = j;
        kind = e.kind();
        message = e.what();
      }
    } catch (const std::exception& e) {
#pragma omp critical(hopf_batch_error)
      if (j < failed) {
        failed = j;
        kind = ErrorKind::evaluation;
        message = e.what();
      }
    }
  }
  if (failed < n) throw Error(kind, "sample " + std::to_string(failed) + ": " + message);
  return out;
}

std::vector<TrajectoryResult> batch_propagate(const SpectralProblem& problem,
                                              const EigenPath& path,
                                              const PropagationConfig& config,
                                              const WedgeBasis* basis) {
  return batch_propagate(problem, std::span<const cplx>(path.lambdas),
                         std::span<const VectorXcd>(path.vectors), config, basis);
}

std::optional<WedgeBasis> basis_for(const SpectralProblem& problem, const EigenPath& path) {
  if (path.dim() == problem.n) return std::nullopt;
  const int rank = path.mode == PathMode::stable_wedge ? problem.n - problem.k : problem.k;
  return WedgeBasis(problem.n, rank);
}

}  // namespace hopf
