#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hopf {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Failure categories. The CLI maps `configuration` to exit code 1 and every
/// other kind to exit code 2.
enum class ErrorKind {
  input_shape,
  evaluation,
  configuration,
  splitting,
  continuation,
  degeneracy,
  resolution,
  numerical,
  stiffness,
  not_converged,
  contour_hits_spectrum,
  pivot_breakdown,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Hermitian product, linear in the first slot: <a, b> = sum_j a_j conj(b_j).
inline cplx inner(const VectorXcd& a, const VectorXcd& b) { return b.dot(a); }

std::string format_lambda(cplx lambda);

}  // namespace hopf
