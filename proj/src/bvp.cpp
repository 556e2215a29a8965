#include "hopf/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hopf/exterior.hpp"

namespace hopf {

namespace {

double min_singular_value(const MatrixXcd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  return svd.singularValues().minCoeff();
}

std::vector<int> complement(const std::vector<int>& pivots, int n) {
  std::vector<int> free;
  for (int c = 0; c < n; ++c) {
    if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free.push_back(c);
  }
  return free;
}

struct SampleBases {
  MatrixXcd u0, u1, v1, q;
};

SampleBases bases_at(const BvpProblem& problem, cplx lambda, const std::vector<int>& left_pivots,
                     const std::vector<int>& right_pivots, double rank_tol) {
  const MatrixXcd l = functional_matrix(problem.left, problem.n, lambda);
  const MatrixXcd r = functional_matrix(problem.right, problem.n, lambda);
  SampleBases b;
  try {
    b.u0 = pivot_nullspace(l, left_pivots);
    b.v1 = pivot_nullspace(r, right_pivots);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(e.what()) + " at lambda = " + format_lambda(lambda));
  }
  b.u1 = r.transpose();
  const MatrixXcd ru = r * b.u1;
  if (min_singular_value(ru) < rank_tol) {
    throw Error(ErrorKind::pivot_breakdown,
                "right functionals are self-paired to zero at lambda = " + format_lambda(lambda));
  }
  b.q = b.u1 * ru.partialPivLu().solve(r);
  return b;
}

PropagationConfig x_stepping(const BvpConfig& config) {
  PropagationConfig p;
  p.xi0 = 0.0;
  p.xi1 = 1.0;
  p.step = config.step;
  p.method = config.method;
  p.scaling = Scaling::none;
  return p;
}

VectorXcd end_wedge(const BvpProblem& problem, cplx lambda, const MatrixXcd& u0,
                    const MatrixXcd& q, const BvpConfig& config) {
  const PropagationConfig p = x_stepping(config);
  const LinearDrift drift = [&problem, lambda](double x) { return problem.coefficient(lambda, x); };
  MatrixXcd mu(problem.n, problem.k);
  for (int i = 0; i < problem.k; ++i) {
    VectorXcd u = u0.col(i);
    double start = 0.0;
    if (config.interior_projection) {
      const auto [position, weight] = *config.interior_projection;
      u = integrate_linear(drift, u, 0.0, position, p).final_vector;
      const MatrixXcd pl = MatrixXcd::Identity(problem.n, problem.n) - q;
      u = u - weight * (pl * u);
      start = position;
    }
    mu.col(i) = q * integrate_linear(drift, u, start, 1.0, p).final_vector;
  }
  VectorXcd w = wedge(mu, WedgeBasis(problem.n, problem.k)).coords;
  const double norm = w.norm();
  if (!(norm >= 1e-10)) {
    std::ostringstream os;
    os << "projected end state vanishes (norm " << norm << ") at lambda = "
       << format_lambda(lambda);
    throw Error(ErrorKind::contour_hits_spectrum, os.str());
  }
  return w / norm;
}

BvpResult finish(const Contour& contour, std::vector<VectorXcd> vectors,
                 const BvpConfig& config) {
  BvpResult result;
  result.loop = make_loop(contour.samples, std::move(vectors), LoopSource::bvp);
  result.estimate =
      make_estimate(geometric_phase(result.loop, config.phase), config.phase.winding_tol);
  return result;
}

void check_problem(const BvpProblem& problem) {
  if (problem.n < 1 || problem.k < 1 || problem.k >= problem.n) {
    throw Error(ErrorKind::configuration, "BVP needs 0 < k < n");
  }
  if (static_cast<int>(problem.left.size()) != problem.n - problem.k ||
      static_cast<int>(problem.right.size()) != problem.k) {
    throw Error(ErrorKind::input_shape, "BVP needs n - k left and k right functionals");
  }
}

}  // namespace

cplx section_product(const VectorXcd& eta, const VectorXcd& nu) {
  if (eta.size() != nu.size()) throw Error(ErrorKind::input_shape, "section length mismatch");
  return eta.dot(nu);
}

MatrixXcd functional_matrix(const std::vector<BoundaryFn>& family, int n, cplx lambda) {
  MatrixXcd l(static_cast<Eigen::Index>(family.size()), n);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const VectorXcd f = family[i](std::conj(lambda));
    if (f.size() != n) throw Error(ErrorKind::input_shape, "boundary functional has wrong length");
    if (!f.allFinite()) {
      throw Error(ErrorKind::evaluation,
                  "boundary functional not finite at lambda = " + format_lambda(lambda));
    }
    l.row(static_cast<Eigen::Index>(i)) = f.conjugate().transpose();
  }
  return l;
}

double boundary_holomorphy_residual(const BvpProblem& problem, cplx lambda, double h) {
  double worst = 0.0;
  for (const auto* family : {&problem.left, &problem.right}) {
    for (const auto& f : *family) {
      auto g = [&](cplx z) -> VectorXcd { return f(std::conj(z)).conjugate(); };
      const VectorXcd dx = (g(lambda + h) - g(lambda - h)) / (2.0 * h);
      const VectorXcd dy = (g(lambda + cplx(0, h)) - g(lambda - cplx(0, h))) / (2.0 * h);
      const VectorXcd dbar = 0.5 * (dx + cplx(0, 1) * dy);
      const double scale = std::max({1.0, g(lambda).norm(), dx.norm()});
      worst = std::max(worst, dbar.norm() / scale);
    }
  }
  return worst;
}

std::vector<int> choose_pivots(const MatrixXcd& l, double rank_tol) {
  if (min_singular_value(l) < rank_tol) {
    throw Error(ErrorKind::pivot_breakdown, "boundary functionals are rank deficient");
  }
  Eigen::FullPivLU<MatrixXcd> lu(l);
  std::vector<int> pivots;
  for (Eigen::Index i = 0; i < l.rows(); ++i) pivots.push_back(lu.permutationQ().indices()(i));
  std::sort(pivots.begin(), pivots.end());
  return pivots;
}

MatrixXcd pivot_nullspace(const MatrixXcd& l, const std::vector<int>& pivots) {
  const int n = static_cast<int>(l.cols());
  const int m = static_cast<int>(pivots.size());
  const auto free = complement(pivots, n);
  MatrixXcd lp(l.rows(), m);
  MatrixXcd lf(l.rows(), static_cast<Eigen::Index>(free.size()));
  for (int c = 0; c < m; ++c) lp.col(c) = l.col(pivots[c]);
  for (std::size_t c = 0; c < free.size(); ++c) lf.col(c) = l.col(free[c]);
  const double pivot_size = min_singular_value(lp);
  if (pivot_size < 1e-8) {
    std::ostringstream os;
    os << "pivot block singular (smallest singular value " << pivot_size << ")";
    throw Error(ErrorKind::pivot_breakdown, os.str());
  }
  const MatrixXcd solved = lp.partialPivLu().solve(lf);
  MatrixXcd out = MatrixXcd::Zero(n, static_cast<Eigen::Index>(free.size()));
  for (std::size_t c = 0; c < free.size(); ++c) {
    out(free[c], static_cast<Eigen::Index>(c)) = 1.0;
    for (int p = 0; p < m; ++p) out(pivots[p], static_cast<Eigen::Index>(c)) = -solved(p, c);
  }
  return out;
}

BoundaryBases build_bases(const BvpProblem& problem, const Contour& contour,
                          const BasesOptions& options) {
  check_problem(problem);
  if (contour.size() == 0) throw Error(ErrorKind::configuration, "empty contour");
  const cplx first = contour[0];
  const double holo = boundary_holomorphy_residual(problem, first);
  if (holo > options.holomorphy_tol) {
    std::ostringstream os;
    os << "boundary functionals are not holomorphic in conj(lambda) (residual " << holo << ")";
    throw Error(ErrorKind::evaluation, os.str());
  }
  BoundaryBases out;
  out.left_pivots =
      choose_pivots(functional_matrix(problem.left, problem.n, first), options.rank_tol);
  out.right_pivots =
      choose_pivots(functional_matrix(problem.right, problem.n, first), options.rank_tol);
  const std::size_t n = contour.size();
  out.u0.reserve(n);
  out.u1.reserve(n);
  out.v1.reserve(n);
  out.q.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto b = bases_at(problem, contour[j], out.left_pivots, out.right_pivots, options.rank_tol);
    out.u0.push_back(std::move(b.u0));
    out.u1.push_back(std::move(b.u1));
    out.v1.push_back(std::move(b.v1));
    out.q.push_back(std::move(b.q));
  }
  cplx wrap = contour[0];
  if (contour.center && contour.radius) {
    wrap = *contour.center + *contour.radius * cplx(std::cos(kTwoPi), std::sin(kTwoPi));
  }
  const auto closing =
      bases_at(problem, wrap, out.left_pivots, out.right_pivots, options.rank_tol);
  out.closure_defect = std::max({(closing.u0 - out.u0.front()).norm(),
                                 (closing.u1 - out.u1.front()).norm(),
                                 (closing.v1 - out.v1.front()).norm()});
  if (out.closure_defect > options.closure_tol) {
    std::ostringstream os;
    os << "boundary bases do not close (defect " << out.closure_defect << ")";
    throw Error(ErrorKind::degeneracy, os.str());
  }
  return out;
}

BvpResult bvp_phase_serial(const BvpProblem& problem, const Contour& contour,
                           const BvpConfig& config) {
  const BoundaryBases bases = build_bases(problem, contour, config.bases);
  std::vector<VectorXcd> vectors(contour.size());
  for (std::size_t j = 0; j < contour.size(); ++j) {
    vectors[j] = end_wedge(problem, contour[j], bases.u0[j], bases.q[j], config);
  }
  return finish(contour, std::move(vectors), config);
}

BvpResult bvp_phase(const BvpProblem& problem, const Contour& contour, const BvpConfig& config) {
  const BoundaryBases bases = build_bases(problem, contour, config.bases);
  const long n = static_cast<long>(contour.size());
  std::vector<VectorXcd> vectors(contour.size());
  long failed = n;
  ErrorKind kind = ErrorKind::numerical;
  std::string message;
#pragma omp parallel for schedule(dynamic, 8)
  for (long j = 0; j < n; ++j) {
    try {
      vectors[j] = end_wedge(problem, contour[j], bases.u0[j], bases.q[j], config);
    } catch (const Error& e) {
#pragma omp critical(hopf_bvp_error)
      if (j < failed) {
        failed = j;
        kind = e.kind();
        message = e.what();
      }
    }
  }
  if (failed < n) throw Error(kind, "sample " + std::to_string(failed) + ": " + message);
  return finish(contour, std::move(vectors), config);
}

BvpProblem make_dirichlet() {
  BvpProblem p;
  p.label = "dirichlet";
  p.n = 2;
  p.k = 1;
  p.coefficient = [](cplx lambda, double) {
    MatrixXcd a(2, 2);
    a << 0.0, 1.0, lambda, 0.0;
    return a;
  };
  const BoundaryFn first = [](cplx) {
    VectorXcd v(2);
    v << 1.0, 0.0;
    return v;
  };
  p.left = {first};
  p.right = {first};
  return p;
}

std::vector<std::string> registered_bvps() { return {"dirichlet"}; }

BvpProblem find_bvp(const std::string& name) {
  if (name == "dirichlet") return make_dirichlet();
  throw Error(ErrorKind::configuration, "unknown BVP problem '" + name + "'");
}

}  // namespace hopf
