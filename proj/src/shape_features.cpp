#include "vegtrack/shape_features.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>

namespace vegtrack {
namespace {

// Neighbor directions indexed clockwise on screen (y down):
// 0=E 1=SE 2=S 3=SW 4=W 5=NW 6=N 7=NE.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

struct GridPoint {
  int x, y;
  bool operator==(const GridPoint&) const = default;
};

// Border following around one component. Scanning the neighbors of the
// current pixel counter-clockwise (decreasing direction index) from just
// past the backtrack direction walks the outer border counter-clockwise in
// image coordinates.
std::vector<GridPoint> follow_border(const MaskRaster& mask, GridPoint start) {
  auto fg = [&](int x, int y) {
    return x >= 0 && x < mask.width() && y >= 0 && y < mask.height() &&
           mask.at(y, x);
  };
  // One tracing step from (cur, back): scan the neighbors counter-clockwise
  // starting just past the backtrack direction; returns the direction of the
  // first foreground neighbor, or -1 for an isolated pixel.
  auto advance = [&](GridPoint cur, int back) {
    int dir = (back + 7) % 8;
    for (int step = 0; step < 8; ++step, dir = (dir + 7) % 8)
      if (fg(cur.x + kDx[dir], cur.y + kDy[dir])) return dir;
    return -1;
  };
  auto next_back_of = [&](GridPoint cur, int found) {
    // backtrack of the new pixel: the last background neighbor scanned,
    // which sits one step clockwise of `found` around `cur`
    const int last_bg = (found + 1) % 8;
    const GridPoint bg_px{cur.x + kDx[last_bg], cur.y + kDy[last_bg]};
    const GridPoint next{cur.x + kDx[found], cur.y + kDy[found]};
    for (int d = 0; d < 8; ++d)
      if (next.x + kDx[d] == bg_px.x && next.y + kDy[d] == bg_px.y) return d;
    return -1;
  };

  std::vector<GridPoint> border;
  border.push_back(start);
  // Start pixel is topmost-leftmost, so its N neighbor is background.
  const int first_dir = advance(start, 6);
  if (first_dir < 0) return border;  // isolated pixel

  GridPoint cur = start;
  int back = 6;
  const std::size_t limit = 8 * mask.area() + 8;
  while (true) {
    const int found = advance(cur, back);
    const GridPoint next{cur.x + kDx[found], cur.y + kDy[found]};
    const int nb = next_back_of(cur, found);
    // The walk stops when it re-enters the start pixel about to repeat the
    // first edge; a mid-cycle pass through the start (thin pinch) continues
    // and emits it again.
    if (next == start && advance(start, nb) == first_dir) break;
    cur = next;
    back = nb;
    border.push_back(cur);
    if (border.size() > limit)
      throw std::logic_error("trace_contour: border walk did not close");
  }
  return border;
}

}  // namespace

Contour trace_contour(const MaskRaster& mask) {
  ComponentStart comp = largest_component_start(mask);
  if (comp.components == 0) throw EmptyMask("trace_contour: mask has no foreground");
  // Distinct 8-connected components share no 8-neighbors, so the walk can
  // run on the original mask: it never leaves the start pixel's component.
  auto border = follow_border(mask, GridPoint{comp.x, comp.y});
  Contour c;
  c.points.reserve(border.size());
  for (const auto& p : border)
    c.points.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  return c;
}

CentroidSignature centroid_signature(const Contour& c) {
  const int n = c.size();
  if (n < 1) throw TooFewPoints("centroid_signature: empty contour");
  CentroidSignature sig;
  double sx = 0, sy = 0;
  for (const auto& p : c.points) {
    sx += p.x;
    sy += p.y;
  }
  sig.x_c = sx / n;
  sig.y_c = sy / n;
  sig.r.reserve(static_cast<std::size_t>(n));
  // Distances use (n*x - sx)/n rather than x - sx/n: for integer-valued
  // contours the numerator is an exact integer, which makes the signature
  // (and the descriptor built on it) exactly translation invariant.
  for (const auto& p : c.points)
    sig.r.push_back(std::hypot((n * p.x - sx) / n, (n * p.y - sy) / n));
  return sig;
}

FourierDescriptor fourier_descriptor(const CentroidSignature& sig, int length) {
  if (length < 1)
    throw std::invalid_argument("fourier_descriptor: length must be >= 1");
  const int n = static_cast<int>(sig.r.size());
  if (n < length + 2)
    throw TooFewPoints("fourier_descriptor: need at least length + 2 points");

  double mean_r = 0;
  for (double r : sig.r) mean_r += r;
  mean_r /= n;

  // Only the coefficients k = 1 .. length+1 are consumed; evaluate them
  // directly instead of a full transform.
  std::vector<double> magnitudes(static_cast<std::size_t>(length) + 1);
  const double base = -2.0 * std::numbers::pi / n;
  for (int k = 1; k <= length + 1; ++k) {
    const std::complex<double> w(std::cos(base * k), std::sin(base * k));
    std::complex<double> phase(1.0, 0.0);
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      acc += sig.r[static_cast<std::size_t>(i)] * phase;
      phase *= w;
    }
    magnitudes[static_cast<std::size_t>(k - 1)] = std::abs(acc) / n;
  }

  const double g1 = magnitudes[0];
  if (g1 < kFdDegeneracyScale * mean_r)
    throw DegenerateSignature("fourier_descriptor: |G_1| below degeneracy threshold");

  FourierDescriptor fd;
  fd.values.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i)
    fd.values.push_back(magnitudes[static_cast<std::size_t>(i + 1)] / g1);
  return fd;
}

EllipseFit fit_ellipse(const Contour& c) {
  const int n = c.size();
  if (n < 5) throw InsufficientPoints("fit_ellipse: need at least 5 points");

  // Shift near the centroid for conditioning; the conic is mapped back
  // below. The shift is floored so integer-translated contours see the same
  // relative coordinates.
  double mx = 0, my = 0;
  for (const auto& p : c.points) {
    mx += p.x;
    my += p.y;
  }
  mx = std::floor(mx / n);
  my = std::floor(my / n);

  Eigen::Matrix3d s1 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d s2 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d s3 = Eigen::Matrix3d::Zero();
  for (const auto& p : c.points) {
    const double x = p.x - mx, y = p.y - my;
    Eigen::Vector3d q(x * x, x * y, y * y);
    Eigen::Vector3d l(x, y, 1.0);
    s1 += q * q.transpose();
    s2 += q * l.transpose();
    s3 += l * l.transpose();
  }

  Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
  if (!lu.isInvertible())
    throw DegenerateGeometry("fit_ellipse: points are collinear or coincident");
  Eigen::Matrix3d t = -lu.solve(s2.transpose());
  Eigen::Matrix3d m0 = s1 + s2 * t;
  Eigen::Matrix3d m;
  m.row(0) = m0.row(2) / 2.0;
  m.row(1) = -m0.row(1);
  m.row(2) = m0.row(0) / 2.0;

  Eigen::EigenSolver<Eigen::Matrix3d> es(m);
  Eigen::Vector3d a1 = Eigen::Vector3d::Zero();
  bool found = false;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(es.eigenvalues()[i].imag()) > 1e-9) continue;
    Eigen::Vector3d v = es.eigenvectors().col(i).real();
    const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
    if (cond > 0) {
      a1 = v;
      found = true;
      break;
    }
  }
  if (!found)
    throw DegenerateGeometry("fit_ellipse: no ellipse satisfies the constraint");

  Eigen::Vector3d a2 = t * a1;
  double ca = a1(0), cb = a1(1), cc = a1(2);
  double cd = a2(0), ce = a2(1), cf = a2(2);

  // Undo the centroid shift: substitute x -> x - mx, y -> y - my.
  const double d0 = cd - 2.0 * ca * mx - cb * my;
  const double e0 = ce - cb * mx - 2.0 * cc * my;
  const double f0 = cf + ca * mx * mx + cb * mx * my + cc * my * my - cd * mx - ce * my;
  cd = d0;
  ce = e0;
  cf = f0;

  Eigen::Matrix<double, 6, 1> coef;
  coef << ca, cb, cc, cd, ce, cf;
  coef /= coef.norm();
  if (coef(0) + coef(2) < 0) coef = -coef;
  if (!coef.allFinite())
    throw DegenerateGeometry("fit_ellipse: non-finite coefficients");
  if (coef(1) * coef(1) - 4.0 * coef(0) * coef(2) >= 0)
    throw DegenerateGeometry("fit_ellipse: fitted conic is not an ellipse");

  EllipseFit fit;
  for (int i = 0; i < 6; ++i) fit.coefficients[static_cast<std::size_t>(i)] = coef(i);

  // Center, axes and orientation from the conic.
  const double a = coef(0), b = coef(1), cq = coef(2), d = coef(3), e = coef(4),
               f = coef(5);
  Eigen::Matrix2d q;
  q << a, b / 2.0, b / 2.0, cq;
  Eigen::Vector2d center = q.ldlt().solve(Eigen::Vector2d(-d / 2.0, -e / 2.0));
  const double fc = a * center(0) * center(0) + b * center(0) * center(1) +
                    cq * center(1) * center(1) + d * center(0) + e * center(1) + f;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qes(q);
  const double l1 = qes.eigenvalues()(0);  // smaller -> major axis
  const double l2 = qes.eigenvalues()(1);
  if (!(l1 > 0) || !(l2 > 0) || !(fc < 0))
    throw DegenerateGeometry("fit_ellipse: degenerate quadratic form");
  const double major = std::sqrt(-fc / l1);
  const double minor = std::sqrt(-fc / l2);
  fit.axis_ratio = major / minor;

  if (fit.axis_ratio < 1.0 + kCircleAxisRatioEps) {
    fit.theta = 0.0;
  } else {
    Eigen::Vector2d axis = qes.eigenvectors().col(0);
    double theta = std::atan2(axis(1), axis(0));
    if (theta < 0) theta += std::numbers::pi;
    if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    // Axis angles are modulo pi; values within rounding of pi are 0.
    if (std::numbers::pi - theta < 1e-9) theta = 0.0;
    fit.theta = theta;
  }
  fit.theta_norm = fit.theta / std::numbers::pi;

  double residual = 0;
  for (const auto& p : c.points) {
    const double v = a * p.x * p.x + b * p.x * p.y + cq * p.y * p.y + d * p.x +
                     e * p.y + f;
    residual += v * v;
  }
  fit.residual = residual;
  return fit;
}

ShapeFeature extract_shape_feature(const MaskRaster& mask, int fd_length) {
  Contour contour = trace_contour(mask);
  FourierDescriptor fd = fourier_descriptor(centroid_signature(contour), fd_length);
  EllipseFit ellipse = fit_ellipse(contour);
  ShapeFeature feat;
  feat.values = fd.values;
  feat.values.push_back(ellipse.axis_ratio);
  feat.values.push_back(ellipse.theta_norm);
  return feat;
}

}  // namespace vegtrack
