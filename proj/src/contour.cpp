#include "hopf/contour.hpp"

#include <cmath>

namespace hopf {

Contour Contour::reversed() const {
  Contour out = *this;
  out.orientation = -orientation;
  for (std::size_t j = 1; j < samples.size(); ++j) out.samples[j] = samples[samples.size() - j];
  return out;
}

Contour discretize_contour(cplx center, double radius, std::size_t n) {
  if (n < kMinContourSamples) {
    throw Error(ErrorKind::configuration, "contour needs at least " +
                                              std::to_string(kMinContourSamples) +
                                              " samples, got " + std::to_string(n));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::configuration, "contour radius must be positive");
  }
  Contour c;
  c.samples.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    c.samples[j] = center + radius * cplx(std::cos(angle), std::sin(angle));
  }
  c.center = center;
  c.radius = radius;
  return c;
}

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 &&
         d3 != 0 && d4 != 0;
}

}  // namespace

Contour contour_from_points(std::vector<cplx> points) {
  const std::size_t n = points.size();
  if (n < kMinContourSamples) {
    throw Error(ErrorKind::configuration, "contour needs at least " +
                                              std::to_string(kMinContourSamples) + " samples");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(points[i], points[i + 1], points[j], points[(j + 1) % n])) {
        throw Error(ErrorKind::configuration,
                    "contour is not simple: edges " + std::to_string(i) + " and " +
                        std::to_string(j) + " intersect");
      }
    }
  }
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) area += cross(points[i], points[(i + 1) % n]);
  Contour c;
  c.samples = std::move(points);
  c.orientation = area >= 0.0 ? +1 : -1;
  return c;
}

int winding_around(const Contour& contour, cplx z) {
  double total = 0.0;
  for (std::size_t j = 0; j < contour.size(); ++j) {
    total += std::arg((contour[j + 1] - z) / (contour[j] - z));
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

}  // namespace hopf
