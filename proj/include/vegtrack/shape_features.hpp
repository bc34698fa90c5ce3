#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "vegtrack/mask.hpp"

namespace vegtrack {

struct EmptyMask : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooFewPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateSignature : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0;
  double y = 0;
};

// Closed boundary cycle of one connected component; consecutive points are
// 8-neighbors except in the degenerate 1- and 2-point cases.
struct Contour {
  std::vector<Vec2> points;

  int size() const { return static_cast<int>(points.size()); }
};

// Contour centroid plus the per-point centroid distances, in contour order.
struct CentroidSignature {
  double x_c = 0;
  double y_c = 0;
  std::vector<double> r;
};

// Normalized spectrum magnitudes |G_k| / |G_1| for k = 2 .. length+1.
// Ratios are invariant to translation, scale and contour rotation.
struct FourierDescriptor {
  std::vector<double> values;
};

struct EllipseFit {
  // Conic A x^2 + B xy + C y^2 + D x + E y + F = 0, coefficient 6-vector
  // normalized to unit length with A + C > 0.
  std::array<double, 6> coefficients{};
  double axis_ratio = 1.0;  // major/minor, >= 1
  double theta = 0.0;       // major-axis angle in [0, pi); 0 for near-circles
  double theta_norm = 0.0;  // theta / pi in [0, 1)
  double residual = 0.0;    // sum of squared algebraic distances
};

// Concatenated descriptor: [fd values..., axis_ratio, theta_norm].
struct ShapeFeature {
  std::vector<double> values;
};

// Below this fraction of mean(r), |G_1| is treated as degenerate (the shape
// is near-circular) and the descriptor is refused.
inline constexpr double kFdDegeneracyScale = 1e-6;
// Axis ratios below 1 + this report theta = 0 (orientation is meaningless
// for circles).
inline constexpr double kCircleAxisRatioEps = 0.01;

// Outer border of the largest 8-connected foreground component, ordered
// counter-clockwise in image coordinates (y down), starting at the
// topmost-then-leftmost border pixel. Points are pixel centers with integer
// coordinates.
Contour trace_contour(const MaskRaster& mask);

CentroidSignature centroid_signature(const Contour& c);

// length >= 1; requires at least length + 2 contour points.
FourierDescriptor fourier_descriptor(const CentroidSignature& sig, int length);

// Least-squares conic fit with the ellipse-specific algebraic constraint
// (direct method). Requires >= 5 non-collinear points.
EllipseFit fit_ellipse(const Contour& c);

ShapeFeature extract_shape_feature(const MaskRaster& mask, int fd_length);

}  // namespace vegtrack
