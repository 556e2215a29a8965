#pragma once

#include <optional>
#include <vector>

#include "hopf/common.hpp"

namespace hopf {

/// Closed curve in the spectral plane, sampled at s_j = j / N. Sample N is
/// identified with sample 0.
struct Contour {
  std::vector<cplx> samples;
  int orientation = +1;  // +1 counterclockwise
  std::optional<cplx> center;
  std::optional<double> radius;

  std::size_t size() const noexcept { return samples.size(); }
  cplx operator[](std::size_t j) const { return samples[j % samples.size()]; }

  /// Same curve traversed the other way; sample 0 stays first.
  Contour reversed() const;
};

inline constexpr std::size_t kMinContourSamples = 16;

/// lambda_j = center + radius * exp(2 pi i j / N), counterclockwise.
Contour discretize_contour(cplx center, double radius, std::size_t n);

/// Explicit closed polygon. Checks N >= 16 and that no two non-adjacent edges
/// cross. Orientation is taken from the signed area.
Contour contour_from_points(std::vector<cplx> points);

/// Winding number of the sampled contour around `z`.
int winding_around(const Contour& contour, cplx z);

}  // namespace hopf
