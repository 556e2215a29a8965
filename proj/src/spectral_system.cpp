#include "hopf/spectral_system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

// The Boost 1.74 pchip header calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

namespace hopf {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

Eigen::VectorXd checked_wave(const ReactionDiffusionSpec& spec, double xi) {
  Eigen::VectorXd u = spec.wave(xi);
  if (u.size() != spec.m) {
    throw Error(ErrorKind::input_shape, spec.label + ": wave has " + std::to_string(u.size()) +
                                            " components, expected " + std::to_string(spec.m));
  }
  if (!all_finite(u)) {
    std::ostringstream os;
    os << spec.label << ": wave is not finite at xi = " << xi;
    throw Error(ErrorKind::evaluation, os.str());
  }
  return u;
}

MatrixXcd rd_block(int m, cplx lambda, const Eigen::MatrixXd& jac, double speed) {
  MatrixXcd a = MatrixXcd::Zero(2 * m, 2 * m);
  a.topRightCorner(m, m).setIdentity();
  a.bottomLeftCorner(m, m) = lambda * MatrixXcd::Identity(m, m) - jac.cast<cplx>();
  a.bottomRightCorner(m, m) = -speed * MatrixXcd::Identity(m, m);
  return a;
}

std::vector<cplx> eigenvalues_of(const MatrixXcd& a, cplx lambda) {
  Eigen::ComplexEigenSolver<MatrixXcd> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigensolver failed at lambda = " + format_lambda(lambda));
  }
  std::vector<cplx> ev(solver.eigenvalues().data(),
                       solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() < y.imag();
  });
  return ev;
}

cplx signed_sum(const SpectralProblem& problem, cplx lambda, End end, double gap_tol,
                bool unstable) {
  const auto ev = asymptotic_spectrum(problem, lambda, end);
  cplx sum = 0.0;
  int count = 0;
  for (cplx mu : ev) {
    if (std::abs(mu.real()) < gap_tol) {
      throw Error(ErrorKind::splitting, "asymptotic eigenvalue " + format_lambda(mu) +
                                            " on the imaginary axis at lambda = " +
                                            format_lambda(lambda));
    }
    if ((mu.real() > 0.0) == unstable) {
      sum += mu;
      ++count;
    }
  }
  const int expected = unstable ? problem.k : problem.n - problem.k;
  if (count != expected) {
    throw Error(ErrorKind::splitting,
                "expected " + std::to_string(expected) + (unstable ? " unstable" : " stable") +
                    " eigenvalues at lambda = " + format_lambda(lambda) + ", found " +
                    std::to_string(count));
  }
  return sum;
}

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input_shape: return "input-shape";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::splitting: return "splitting";
    case ErrorKind::continuation: return "continuation";
    case ErrorKind::degeneracy: return "degeneracy";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::not_converged: return "not-converged";
    case ErrorKind::contour_hits_spectrum: return "contour-hits-spectrum";
    case ErrorKind::pivot_breakdown: return "pivot-breakdown";
  }
  return "unknown";
}

std::string format_lambda(cplx lambda) {
  std::ostringstream os;
  os.precision(10);
  os << lambda.real() << (lambda.imag() < 0 ? "-" : "+") << std::abs(lambda.imag()) << "i";
  return os.str();
}

SpectralProblem assemble_rd_system(const ReactionDiffusionSpec& spec) {
  if (spec.m < 1 || !spec.wave || !spec.jacobian) {
    throw Error(ErrorKind::configuration, spec.label + ": incomplete reaction-diffusion spec");
  }
  if (!(spec.decay_rate > 0.0) || !std::isfinite(spec.decay_rate) || !std::isfinite(spec.speed)) {
    throw Error(ErrorKind::configuration, spec.label + ": decay rate must be positive and finite");
  }
  const double far = 40.0 / spec.decay_rate;
  const Eigen::VectorXd u_minus = spec.limit_minus ? *spec.limit_minus : checked_wave(spec, -far);
  const Eigen::VectorXd u_plus = spec.limit_plus ? *spec.limit_plus : checked_wave(spec, far);
  if (u_minus.size() != spec.m || u_plus.size() != spec.m || !all_finite(u_minus) ||
      !all_finite(u_plus)) {
    throw Error(ErrorKind::evaluation, spec.label + ": wave limits are not finite m-vectors");
  }

  const int m = spec.m;
  const double c = spec.speed;
  const Eigen::MatrixXd jac_minus = spec.jacobian(u_minus);
  const Eigen::MatrixXd jac_plus = spec.jacobian(u_plus);

  SpectralProblem p;
  p.label = spec.label;
  p.n = 2 * m;
  p.k = m;
  p.decay_rate = spec.decay_rate;
  p.coefficient = [spec, m, c](cplx lambda, double xi) {
    const Eigen::MatrixXd jac = spec.jacobian(checked_wave(spec, xi));
    if (!jac.allFinite()) {
      std::ostringstream os;
      os << spec.label << ": Jacobian is not finite at xi = " << xi;
      throw Error(ErrorKind::evaluation, os.str());
    }
    return rd_block(m, lambda, jac, c);
  };
  p.asym_minus = [m, c, jac_minus](cplx lambda) { return rd_block(m, lambda, jac_minus, c); };
  p.asym_plus = [m, c, jac_plus](cplx lambda) { return rd_block(m, lambda, jac_plus, c); };
  return p;
}

double default_half_window(const SpectralProblem& problem) {
  if (problem.preferred_half_window) return *problem.preferred_half_window;
  return std::log(1e8) / problem.decay_rate;
}

std::vector<cplx> asymptotic_spectrum(const SpectralProblem& problem, cplx lambda, End end) {
  return eigenvalues_of(problem.asymptotic(lambda, end), lambda);
}

cplx unstable_sum(const SpectralProblem& problem, cplx lambda, End end, double gap_tol) {
  return signed_sum(problem, lambda, end, gap_tol, true);
}

cplx stable_sum(const SpectralProblem& problem, cplx lambda, End end, double gap_tol) {
  return signed_sum(problem, lambda, end, gap_tol, false);
}

cplx top_eigenvalue(const SpectralProblem& problem, cplx lambda, End end) {
  return asymptotic_spectrum(problem, lambda, end).front();
}

SplittingReport check_splitting(const SpectralProblem& problem, const Contour& contour,
                                double gap_tol) {
  if (!(gap_tol > 0.0)) throw Error(ErrorKind::configuration, "gap_tol must be positive");
  SplittingReport report;
  report.ok = true;
  report.min_spectral_gap = std::numeric_limits<double>::infinity();
  report.k_minus.reserve(contour.size());
  report.k_plus.reserve(contour.size());
  for (std::size_t j = 0; j < contour.size(); ++j) {
    const cplx lambda = contour[j];
    for (End end : {End::minus, End::plus}) {
      int count = 0;
      for (cplx mu : asymptotic_spectrum(problem, lambda, end)) {
        report.min_spectral_gap = std::min(report.min_spectral_gap, std::abs(mu.real()));
        if (mu.real() > 0.0) ++count;
      }
      (end == End::minus ? report.k_minus : report.k_plus).push_back(count);
      if (report.ok && count != problem.k) {
        report.ok = false;
        report.detail = std::string(end == End::minus ? "A-inf" : "A+inf") + " has " +
                        std::to_string(count) + " unstable eigenvalues at lambda = " +
                        format_lambda(lambda) + ", expected " + std::to_string(problem.k);
      }
    }
  }
  if (report.ok && !(report.min_spectral_gap > gap_tol)) {
    report.ok = false;
    report.detail = "asymptotic eigenvalue within gap_tol of the imaginary axis";
  }
  return report;
}

double asymptotic_defect(const SpectralProblem& problem, cplx lambda, double tol) {
  const double l = 2.0 / problem.decay_rate * std::log(1.0 / tol);
  const double dm = (problem.coefficient(lambda, -l) - problem.asym_minus(lambda)).norm();
  const double dp = (problem.coefficient(lambda, l) - problem.asym_plus(lambda)).norm();
  return std::max(dm, dp);
}

double cauchy_riemann_residual(const SpectralProblem& problem, cplx lambda, double xi,
                               double h) {
  const cplx ih(0.0, h);
  const MatrixXcd d_re =
      (problem.coefficient(lambda + h, xi) - problem.coefficient(lambda - h, xi)) / (2.0 * h);
  const MatrixXcd d_im =
      (problem.coefficient(lambda + ih, xi) - problem.coefficient(lambda - ih, xi)) / (2.0 * ih);
  return (d_re - d_im).norm() / std::max(1.0, d_re.norm());
}

std::function<double(double)> interpolate_profile(std::vector<double> xi,
                                                  std::vector<double> values) {
  if (xi.size() != values.size() || xi.size() < 4) {
    throw Error(ErrorKind::configuration, "sampled wave needs at least 4 (xi, U) rows");
  }
  for (std::size_t i = 1; i < xi.size(); ++i) {
    if (!(xi[i] > xi[i - 1])) {
      throw Error(ErrorKind::configuration, "sampled wave: xi must be strictly increasing");
    }
  }
  const double lo = xi.front();
  const double hi = xi.back();
  const double v_lo = values.front();
  const double v_hi = values.back();
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(xi), std::move(values));
  return [spline, lo, hi, v_lo, v_hi](double x) {
    if (x <= lo) return v_lo;
    if (x >= hi) return v_hi;
    return (*spline)(x);
  };
}

std::pair<std::vector<double>, std::vector<double>> read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::configuration, "cannot open wave file " + path);
  std::vector<double> xi;
  std::vector<double> u;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0;
    double b = 0.0;
    if (!(row >> a >> b)) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorKind::configuration, "malformed row in " + path + ": " + line);
    }
    first = false;
    xi.push_back(a);
    u.push_back(b);
  }
  return {std::move(xi), std::move(u)};
}

SpectralProblem make_bistable() {
  ReactionDiffusionSpec spec;
  spec.label = "bistable";
  spec.m = 1;
  spec.speed = 0.0;
  spec.decay_rate = 1.0;
  spec.wave = [](double xi) {
    Eigen::VectorXd u(1);
    u(0) = std::sqrt(2.0) / std::cosh(xi);
    return u;
  };
  spec.jacobian = [](const Eigen::VectorXd& u) {
    Eigen::MatrixXd f(1, 1);
    f(0, 0) = 3.0 * u(0) * u(0) - 1.0;
    return f;
  };
  spec.limit_minus = Eigen::VectorXd::Zero(1);
  spec.limit_plus = Eigen::VectorXd::Zero(1);
  SpectralProblem p = assemble_rd_system(spec);
  // The pulse is even, so sech^2 is evaluated directly.
  p.coefficient = [](cplx lambda, double xi) {
    const double s = 1.0 / std::cosh(xi);
    MatrixXcd a(2, 2);
    a << 0.0, 1.0, lambda + 1.0 - 6.0 * s * s, 0.0;
    return a;
  };
  const EigenFormula unstable = [](cplx lambda) {
    const cplx root = std::sqrt(lambda + 1.0);
    VectorXcd v(2);
    v << 1.0, root;
    return std::make_pair(root, v);
  };
  p.unstable_minus = unstable;
  p.unstable_plus = unstable;
  p.preferred_half_window = 11.0;
  return p;
}

SpectralProblem make_bistable_pair() {
  ReactionDiffusionSpec spec;
  spec.label = "bistable_pair";
  spec.m = 2;
  spec.decay_rate = 1.0;
  spec.wave = [](double xi) {
    Eigen::VectorXd u(2);
    u.setConstant(std::sqrt(2.0) / std::cosh(xi));
    return u;
  };
  spec.jacobian = [](const Eigen::VectorXd& u) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 2);
    f(0, 0) = 3.0 * u(0) * u(0) - 1.0;
    f(1, 1) = 3.0 * u(1) * u(1) - 1.0;
    return f;
  };
  spec.limit_minus = Eigen::VectorXd::Zero(2);
  spec.limit_plus = Eigen::VectorXd::Zero(2);
  SpectralProblem p = assemble_rd_system(spec);
  p.preferred_half_window = 11.0;
  return p;
}

SpectralProblem make_nagumo_front(double a) {
  ReactionDiffusionSpec spec;
  spec.label = "nagumo_front";
  spec.m = 1;
  spec.speed = std::sqrt(2.0) * (a - 0.5);
  spec.decay_rate = 1.0 / std::sqrt(2.0);
  spec.wave = [](double xi) {
    Eigen::VectorXd u(1);
    u(0) = 1.0 / (1.0 + std::exp(-xi / std::sqrt(2.0)));
    return u;
  };
  spec.jacobian = [a](const Eigen::VectorXd& u) {
    Eigen::MatrixXd f(1, 1);
    f(0, 0) = -3.0 * u(0) * u(0) + 2.0 * (1.0 + a) * u(0) - a;
    return f;
  };
  spec.limit_minus = Eigen::VectorXd::Zero(1);
  spec.limit_plus = Eigen::VectorXd::Ones(1);
  SpectralProblem p = assemble_rd_system(spec);
  const double c = spec.speed;
  // mu^2 + c mu - (lambda - f'(U)) = 0, unstable root, eigenvector (1, mu).
  auto root_at = [c](double fprime) {
    return EigenFormula([c, fprime](cplx lambda) {
      const cplx mu = 0.5 * (-c + std::sqrt(c * c + 4.0 * (lambda - fprime)));
      VectorXcd v(2);
      v << 1.0, mu;
      return std::make_pair(mu, v);
    });
  };
  p.unstable_minus = root_at(-a);
  p.unstable_plus = root_at(a - 1.0);
  return p;
}

namespace {

const std::map<std::string, SpectralProblem (*)()>& registry() {
  static const std::map<std::string, SpectralProblem (*)()> table = {
      {"bistable", &make_bistable},
      {"bistable_pair", &make_bistable_pair},
      {"nagumo_front", [] { return make_nagumo_front(0.25); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> registered_problems() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

SpectralProblem find_problem(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    throw Error(ErrorKind::configuration, "unknown problem '" + name + "'");
  }
  return it->second();
}

}  // namespace hopf
