#pragma once

#include <Eigen/Dense>
#include <utility>

#include "vegtrack/mask.hpp"

namespace vegtrack {

// Axis-aligned box in continuous pixel coordinates, corners (x1,y1) upper
// left and (x2,y2) lower right, x1 < x2 and y1 < y2. Boxes derived from
// masks use pixel-area semantics: a single pixel at (x,y) spans
// [x, x+1) x [y, y+1).
struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  static BBox from_pixel_box(const PixelBox& p) {
    return {static_cast<double>(p.x_min), static_cast<double>(p.y_min),
            static_cast<double>(p.x_max) + 1.0, static_cast<double>(p.y_max) + 1.0};
  }
};

double iou(const BBox& a, const BBox& b);

// Generalized IoU: IoU - |Area_C - Area_Union| / |Area_C| where C is the
// smallest box enclosing both. Range (-1, 1]; 1 only for identical boxes.
double giou(const BBox& a, const BBox& b);

// Constant-velocity filter on (cx, cy, w, h) with per-axis velocities.
// All noise magnitudes are standard deviations in pixels (velocities in
// pixels/frame).
struct KalmanParams {
  double process_pos_std = 1.0;
  double process_vel_std = 0.1;
  double obs_std = 1.0;
  double init_pos_std = 10.0;
  double init_vel_std = 10.0;
};

struct BoxState {
  Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> cov = Eigen::Matrix<double, 8, 8>::Zero();
};

// Mean converted back to corners; width/height floored at 1 pixel.
BBox state_box(const BoxState& s);

BoxState kf_init(const BBox& b, const KalmanParams& params = {});
std::pair<BoxState, BBox> kf_predict(const BoxState& s, const KalmanParams& params = {});
BoxState kf_update(const BoxState& s, const BBox& observation,
                   const KalmanParams& params = {});

}  // namespace vegtrack
