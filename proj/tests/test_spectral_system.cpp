#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hopf/contour.hpp"
#include "hopf/spectral_system.hpp"

using namespace hopf;

TEST_SUITE("spectral_system") {
  TEST_CASE("bistable asymptotic eigenvalues are +-sqrt(lambda + 1)") {
    const auto p = make_bistable();
    const cplx lambda(0.3, -0.2);
    const cplx root = std::sqrt(lambda + 1.0);
    for (End end : {End::minus, End::plus}) {
      const auto ev = asymptotic_spectrum(p, lambda, end);
      REQUIRE(ev.size() == 2);
      CHECK(std::abs(ev[0] - root) < 1e-12);
      CHECK(std::abs(ev[1] + root) < 1e-12);
    }
    CHECK(std::abs(unstable_sum(p, lambda, End::minus) - root) < 1e-12);
    CHECK(std::abs(stable_sum(p, lambda, End::plus) + root) < 1e-12);
  }

  TEST_CASE("coefficient is the linearisation about sqrt(2) sech") {
    const auto p = make_bistable();
    const double xi = 0.7;
    const double s = 1.0 / std::cosh(xi);
    const MatrixXcd a = p.coefficient(2.0, xi);
    CHECK(std::abs(a(0, 0)) == 0.0);
    CHECK(std::abs(a(0, 1) - 1.0) == 0.0);
    CHECK(std::abs(a(1, 0) - (3.0 - 6.0 * s * s)) < 1e-14);
  }

  TEST_CASE("splitting holds on the small circle with gap sqrt(0.9)") {
    const auto p = make_bistable();
    const auto report = check_splitting(p, discretize_contour(0.0, 0.1, 2000));
    CHECK(report.ok);
    for (int k : report.k_minus) CHECK(k == 1);
    for (int k : report.k_plus) CHECK(k == 1);
    CHECK(report.min_spectral_gap == doctest::Approx(std::sqrt(0.9)).epsilon(1e-9));
  }

  TEST_CASE("splitting fails on a contour through the essential spectrum") {
    const auto p = make_bistable();
    const auto report = check_splitting(p, discretize_contour(-1.0, 0.5, 64));
    CHECK_FALSE(report.ok);
    CHECK_FALSE(report.detail.empty());
    CHECK_THROWS_AS(unstable_sum(p, cplx(-2.0, 0.0), End::minus), Error);
  }

  TEST_CASE("pair system has k = 2 and the unstable sum doubles") {
    const auto p = make_bistable_pair();
    CHECK(p.n == 4);
    CHECK(p.k == 2);
    const cplx lambda(0.05, 0.02);
    CHECK(std::abs(unstable_sum(p, lambda, End::minus) - 2.0 * std::sqrt(lambda + 1.0)) < 1e-10);
  }

  TEST_CASE("reaction-diffusion assembly has the block structure") {
    ReactionDiffusionSpec spec;
    spec.m = 2;
    spec.speed = 0.4;
    spec.wave = [](double xi) {
      Eigen::VectorXd u(2);
      u << std::tanh(xi), std::exp(-xi * xi);
      return u;
    };
    spec.jacobian = [](const Eigen::VectorXd& u) {
      Eigen::MatrixXd j(2, 2);
      j << u(0), 1.0, 2.0, u(1) * u(1);
      return j;
    };
    const auto p = assemble_rd_system(spec);
    CHECK(p.n == 4);
    CHECK(p.k == 2);
    const cplx lambda(0.5, 1.0);
    const double xi = 0.3;
    const MatrixXcd a = p.coefficient(lambda, xi);
    const auto u = spec.wave(xi);
    const Eigen::MatrixXd jac = spec.jacobian(u);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(a(i, j) == 0.0);
        CHECK(a(i, j + 2) == (i == j ? 1.0 : 0.0));
        CHECK(std::abs(a(i + 2, j) - ((i == j ? lambda : 0.0) - jac(i, j))) < 1e-15);
        CHECK(a(i + 2, j + 2) == (i == j ? -0.4 : 0.0));
      }
    }
  }

  TEST_CASE("non-finite wave values are evaluation errors") {
    ReactionDiffusionSpec spec;
    spec.wave = [](double xi) {
      Eigen::VectorXd u(1);
      u(0) = xi > 1.0 ? std::nan("") : 0.0;
      return u;
    };
    spec.jacobian = [](const Eigen::VectorXd& u) { return Eigen::MatrixXd::Constant(1, 1, u(0)); };
    spec.limit_minus = Eigen::VectorXd::Zero(1);
    spec.limit_plus = Eigen::VectorXd::Zero(1);
    const auto p = assemble_rd_system(spec);
    CHECK_NOTHROW(p.coefficient(0.0, 0.0));
    try {
      p.coefficient(0.0, 2.0);
      FAIL("expected an evaluation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::evaluation);
    }
  }

  TEST_CASE("decay hypothesis and holomorphy diagnostics") {
    const auto p = make_bistable();
    CHECK(asymptotic_defect(p, 0.1, 1e-4) < 1e-8);
    CHECK(cauchy_riemann_residual(p, cplx(0.2, 0.1), 0.5) < 1e-8);
    SpectralProblem bad = p;
    bad.coefficient = [](cplx lambda, double) {
      MatrixXcd a(2, 2);
      a << 0.0, 1.0, std::conj(lambda) + 1.0, 0.0;
      return a;
    };
    CHECK(cauchy_riemann_residual(bad, cplx(0.2, 0.1), 0.5) > 0.5);
  }

  TEST_CASE("Nagumo front solves the travelling-wave equation") {
    const double a = 0.25;
    const auto p = make_nagumo_front(a);
    const double c = std::sqrt(2.0) * (a - 0.5);
    auto u = [](double xi) { return 1.0 / (1.0 + std::exp(-xi / std::sqrt(2.0))); };
    auto f = [a](double v) { return v * (1.0 - v) * (v - a); };
    const double h = 1e-4;
    for (double xi : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
      const double d1 = (u(xi + h) - u(xi - h)) / (2 * h);
      const double d2 = (u(xi + h) - 2 * u(xi) + u(xi - h)) / (h * h);
      CHECK(std::abs(d2 + c * d1 + f(u(xi))) < 1e-6);
    }
    for (End end : {End::minus, End::plus}) {
      const auto& formula = end == End::minus ? p.unstable_minus : p.unstable_plus;
      const cplx lambda(0.1, 0.05);
      const auto [mu, v] = formula(lambda);
      const MatrixXcd m = p.asymptotic(lambda, end);
      CHECK((m * v - mu * v).norm() < 1e-12);
      CHECK(std::abs(mu - top_eigenvalue(p, lambda, end)) < 1e-12);
    }
  }

  TEST_CASE("default window follows the decay rate") {
    auto p = make_nagumo_front();
    CHECK(default_half_window(p) == doctest::Approx(std::log(1e8) * std::sqrt(2.0)));
    CHECK(default_half_window(make_bistable()) == 11.0);
  }

  TEST_CASE("pchip interpolation is monotone with constant extrapolation") {
    std::vector<double> xs;
    std::vector<double> ys;
    for (int i = 0; i <= 40; ++i) {
      xs.push_back(-4.0 + 0.2 * i);
      ys.push_back(std::tanh(xs.back()));
    }
    const auto f = interpolate_profile(xs, ys);
    double prev = -2.0;
    for (double x = -4.0; x <= 4.0; x += 0.013) {
      const double v = f(x);
      CHECK(v >= prev - 1e-15);
      CHECK(std::abs(v - std::tanh(x)) < 2e-3);
      prev = v;
    }
    CHECK(f(-10.0) == ys.front());
    CHECK(f(10.0) == ys.back());
    CHECK_THROWS_AS(interpolate_profile({0.0, 1.0}, {0.0, 1.0}), Error);
  }

  TEST_CASE("profile CSV reader skips a header") {
    const std::string path = "profile_test.csv";
    {
      std::ofstream out(path);
      out << "xi,U\n-1,0.1\n0,0.5\n1,0.9\n";
    }
    const auto [xi, u] = read_profile_csv(path);
    std::remove(path.c_str());
    REQUIRE(xi.size() == 3);
    CHECK(xi[2] == 1.0);
    CHECK(u[1] == 0.5);
  }

  TEST_CASE("registry") {
    for (const auto& name : registered_problems()) CHECK(find_problem(name).label == name);
    try {
      find_problem("no_such_problem");
      FAIL("expected a configuration error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::configuration);
    }
  }
}
