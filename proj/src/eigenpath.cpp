#include "hopf/eigenpath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hopf/exterior.hpp"
#include "hopf/io.hpp"

namespace hopf {

namespace {

double effective_step_tol(const EigenPathOptions& options, std::size_t n) {
  return options.step_tol > 0.0 ? options.step_tol : 10.0 * kTwoPi / static_cast<double>(n);
}

// Gram-Schmidt with positive real diagonal: the wedge of the columns only
// changes by a positive real factor.
bool orthonormalize(MatrixXcd& frame) {
  for (Eigen::Index j = 0; j < frame.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      frame.col(j) -= frame.col(i).dot(frame.col(j)) * frame.col(i);
    }
    const double norm = frame.col(j).norm();
    if (!(norm > 1e-300) || !std::isfinite(norm)) return false;
    frame.col(j) /= norm;
  }
  return true;
}

struct Decomposition {
  VectorXcd values;
  MatrixXcd vectors;
  MatrixXcd inverse;
  double condition = 1.0;
};

Decomposition decompose(const MatrixXcd& a, cplx lambda) {
  Eigen::ComplexEigenSolver<MatrixXcd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigensolver failed at lambda = " + format_lambda(lambda));
  }
  Decomposition d;
  d.values = solver.eigenvalues();
  d.vectors = solver.eigenvectors();
  Eigen::JacobiSVD<MatrixXcd> svd(d.vectors);
  const auto& s = svd.singularValues();
  d.condition = s(0) / s(s.size() - 1);
  d.inverse = d.vectors.partialPivLu().inverse();
  return d;
}

// Indices of the tracked eigenvalue group.
std::vector<int> select_group(const Decomposition& d, PathMode mode, const SpectralProblem& p,
                              cplx previous, bool first, cplx lambda) {
  const int n = static_cast<int>(d.values.size());
  std::vector<int> idx;
  if (mode == PathMode::top_eigenvector) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      const cplx a = d.values(x);
      const cplx b = d.values(y);
      return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
    });
    if (first) return {order.front()};
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (std::abs(d.values(i) - previous) < std::abs(d.values(best) - previous)) best = i;
    }
    const double scale = std::max(1.0, std::abs(d.values(order.front())));
    if (d.values(order.front()).real() > d.values(best).real() + 1e-12 * scale) {
      throw Error(ErrorKind::continuation,
                  "top eigenvalue swapped along the contour at lambda = " + format_lambda(lambda) +
                      "; use unstable_wedge mode");
    }
    return {best};
  }
  const bool unstable = mode == PathMode::unstable_wedge;
  for (int i = 0; i < n; ++i) {
    if ((d.values(i).real() > 0.0) == unstable) idx.push_back(i);
  }
  const int expected = unstable ? p.k : p.n - p.k;
  if (static_cast<int>(idx.size()) != expected) {
    throw Error(ErrorKind::splitting, "eigenvalue count changed along the contour at lambda = " +
                                          format_lambda(lambda));
  }
  return idx;
}

MatrixXcd projector(const Decomposition& d, const std::vector<int>& idx) {
  const Eigen::Index n = d.vectors.rows();
  MatrixXcd p = MatrixXcd::Zero(n, n);
  for (int i : idx) p += d.vectors.col(i) * d.inverse.row(i);
  return p;
}

cplx group_value(const Decomposition& d, const std::vector<int>& idx) {
  cplx sum = 0.0;
  for (int i : idx) sum += d.values(i);
  return sum;
}

double ray_angle(const VectorXcd& a, const VectorXcd& b) {
  const VectorXcd perp = a - inner(a, b) * b;
  return std::asin(std::min(1.0, perp.norm()));
}

}  // namespace

EigenPath eigenpath_closed_form(const SpectralProblem& problem, const Contour& contour,
                                const EigenFormula& formula, End end,
                                const EigenPathOptions& options) {
  if (!formula) throw Error(ErrorKind::configuration, "no closed-form eigenpair available");
  EigenPath path;
  path.end = end;
  path.mode = PathMode::top_eigenvector;
  const std::size_t n = contour.size();
  path.lambdas = contour.samples;
  path.vectors.reserve(n);
  path.values.reserve(n);
  const double step_tol = effective_step_tol(options, n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx lambda = contour[j];
    auto [mu, v] = formula(lambda);
    const MatrixXcd a = problem.asymptotic(lambda, end);
    if (v.size() != a.rows()) {
      throw Error(ErrorKind::input_shape, "closed-form eigenvector has wrong length");
    }
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorKind::evaluation, "closed-form eigenvector vanishes at lambda = " +
                                             format_lambda(lambda));
    }
    v /= norm;
    const double residual = (a * v - mu * v).norm();
    if (residual > options.residual_tol * std::max(1.0, a.norm())) {
      std::ostringstream os;
      os << "closed-form pair is not an eigenpair at lambda = " << format_lambda(lambda)
         << " (residual " << residual << ")";
      throw Error(ErrorKind::evaluation, os.str());
    }
    if (j > 0 && (v - path.vectors.back()).norm() > step_tol) {
      throw Error(ErrorKind::degeneracy, "closed-form path jumps near lambda = " +
                                             format_lambda(lambda) + " (branch cut?)");
    }
    path.vectors.push_back(std::move(v));
    path.values.push_back(mu);
  }
  // Closing sample: the parametrisation evaluated at s = 1.
  cplx wrap = contour[0];
  if (contour.center && contour.radius) {
    wrap = *contour.center + *contour.radius * cplx(std::cos(kTwoPi), std::sin(kTwoPi));
  }
  VectorXcd closing = formula(wrap).second;
  closing /= closing.norm();
  path.closure_defect = (closing - path.vectors.front()).norm();
  if (path.closure_defect > options.closure_tol) {
    std::ostringstream os;
    os << "closed-form path does not close (defect " << path.closure_defect << ")";
    throw Error(ErrorKind::degeneracy, os.str());
  }
  return path;
}

EigenPath eigenpath_continuation(const SpectralProblem& problem, const Contour& contour, End end,
                                 PathMode mode, const EigenPathOptions& options) {
  const std::size_t n = contour.size();
  if (n == 0) throw Error(ErrorKind::configuration, "empty contour");
  EigenPath path;
  path.end = end;
  path.mode = mode;
  path.lambdas = contour.samples;
  path.vectors.reserve(n);
  path.values.reserve(n);

  const int rank = mode == PathMode::top_eigenvector ? 1
                   : mode == PathMode::unstable_wedge ? problem.k
                                                      : problem.n - problem.k;
  if (rank < 1) throw Error(ErrorKind::configuration, "empty eigenvalue group");
  const WedgeBasis basis(problem.n, rank);
  const double step_tol = effective_step_tol(options, n);

  auto output = [&](const MatrixXcd& frame) -> VectorXcd {
    if (mode == PathMode::top_eigenvector) return frame.col(0);
    VectorXcd w = wedge(frame, basis).coords;
    return w / w.norm();
  };

  MatrixXcd frame;
  cplx tracked = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const cplx lambda = contour[j];
    const Decomposition d = decompose(problem.asymptotic(lambda, end), lambda);
    if (d.condition > options.condition_limit) {
      std::ostringstream os;
      os << "ill-conditioned eigenbasis (condition " << d.condition
         << ") at lambda = " << format_lambda(lambda);
      throw Error(ErrorKind::continuation, os.str());
    }
    const auto idx = select_group(d, mode, problem, tracked, j == 0, lambda);
    if (j == 0) {
      frame.resize(problem.n, rank);
      for (int c = 0; c < rank; ++c) frame.col(c) = d.vectors.col(idx[c]);
    } else {
      frame = projector(d, idx) * frame;
    }
    if (!orthonormalize(frame)) {
      throw Error(ErrorKind::continuation,
                  "transported frame collapsed at lambda = " + format_lambda(lambda));
    }
    tracked = mode == PathMode::top_eigenvector ? d.values(idx.front()) : group_value(d, idx);
    VectorXcd x = output(frame);
    if (j == n) {
      path.closure_defect = (x - path.vectors.front()).norm();
      break;
    }
    if (j > 0 && (x - path.vectors.back()).norm() > step_tol) {
      throw Error(ErrorKind::continuation,
                  "path under-resolved near lambda = " + format_lambda(lambda) + "; raise N");
    }
    path.vectors.push_back(std::move(x));
    path.values.push_back(tracked);
  }
  if (path.closure_defect > options.closure_tol) {
    std::ostringstream os;
    os << "continued path does not close (defect " << path.closure_defect << ")";
    throw Error(ErrorKind::degeneracy, os.str());
  }
  return path;
}

EigenPath scale_path(const EigenPath& path, int power) {
  EigenPath out = path;
  out.degenerate_scaling += power;
  if (power == 0) return out;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const cplx lambda = out.lambdas[j];
    if (lambda == cplx{0.0, 0.0}) {
      throw Error(ErrorKind::evaluation, "cannot scale by a power of lambda at lambda = 0");
    }
    out.vectors[j] *= std::pow(lambda, power);
    out.vectors[j] /= out.vectors[j].norm();
  }
  return out;
}

double eigen_residual(const SpectralProblem& problem, const EigenPath& path) {
  double worst = 0.0;
  const int dim = path.dim();
  for (std::size_t j = 0; j < path.size(); ++j) {
    MatrixXcd a = problem.asymptotic(path.lambdas[j], path.end);
    if (dim != problem.n) {
      const int rank = path.mode == PathMode::stable_wedge ? problem.n - problem.k : problem.k;
      a = induced_matrix(a, WedgeBasis(problem.n, rank));
    }
    const VectorXcd& x = path.vectors[j];
    worst = std::max(worst, (a * x - path.values[j] * x).norm());
  }
  return worst;
}

double max_ray_step(const EigenPath& path) {
  double worst = 0.0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    worst = std::max(worst,
                     ray_angle(path.vectors[(j + 1) % path.size()], path.vectors[j]));
  }
  return worst;
}

void write_path_csv(const std::string& filename, const std::vector<cplx>& lambdas,
                    const std::vector<VectorXcd>& vectors) {
  CsvWriter csv(filename);
  std::string header = "s,lambda_re,lambda_im";
  const Eigen::Index dim = vectors.empty() ? 0 : vectors.front().size();
  for (Eigen::Index i = 0; i < dim; ++i) {
    header += ",re_" + std::to_string(i) + ",im_" + std::to_string(i);
  }
  csv.header(header);
  const double n = static_cast<double>(vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    csv << static_cast<double>(j) / n << lambdas[j].real() << lambdas[j].imag();
    for (Eigen::Index i = 0; i < dim; ++i) csv << vectors[j](i).real() << vectors[j](i).imag();
    csv.end_row();
  }
}

}  // namespace hopf
