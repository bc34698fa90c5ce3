#include "vegtrack/motion_model.hpp"

#include <algorithm>
#include <cmath>

namespace vegtrack {
namespace {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat48 = Eigen::Matrix<double, 4, 8>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Vec4 = Eigen::Matrix<double, 4, 1>;

Mat8 transition() {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

Mat8 process_noise(const KalmanParams& p) {
  Mat8 q = Mat8::Zero();
  for (int i = 0; i < 4; ++i) {
    q(i, i) = p.process_pos_std * p.process_pos_std;
    q(i + 4, i + 4) = p.process_vel_std * p.process_vel_std;
  }
  return q;
}

Vec4 box_to_obs(const BBox& b) {
  return Vec4(b.center_x(), b.center_y(), b.width(), b.height());
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (ix <= 0 || iy <= 0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

double giou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  const double cw = std::max(a.x2, b.x2) - std::min(a.x1, b.x1);
  const double ch = std::max(a.y2, b.y2) - std::min(a.y1, b.y1);
  const double enclosing = cw * ch;
  return inter / uni - std::abs(enclosing - uni) / enclosing;
}

BBox state_box(const BoxState& s) {
  const double w = std::max(1.0, s.mean(2));
  const double h = std::max(1.0, s.mean(3));
  return {s.mean(0) - w / 2.0, s.mean(1) - h / 2.0, s.mean(0) + w / 2.0,
          s.mean(1) + h / 2.0};
}

BoxState kf_init(const BBox& b, const KalmanParams& params) {
  BoxState s;
  s.mean.head<4>() = box_to_obs(b);
  for (int i = 0; i < 4; ++i) {
    s.cov(i, i) = params.init_pos_std * params.init_pos_std;
    s.cov(i + 4, i + 4) = params.init_vel_std * params.init_vel_std;
  }
  return s;
}

std::pair<BoxState, BBox> kf_predict(const BoxState& s, const KalmanParams& params) {
  const Mat8 f = transition();
  BoxState out;
  out.mean = f * s.mean;
  out.cov = f * s.cov * f.transpose() + process_noise(params);
  return {out, state_box(out)};
}

BoxState kf_update(const BoxState& s, const BBox& observation,
                   const KalmanParams& params) {
  Mat48 h = Mat48::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  const Mat4 r = Mat4::Identity() * (params.obs_std * params.obs_std);

  const Vec4 innovation = box_to_obs(observation) - h * s.mean;
  const Mat4 innovation_cov = h * s.cov * h.transpose() + r;
  const Eigen::Matrix<double, 8, 4> gain =
      s.cov * h.transpose() * innovation_cov.llt().solve(Mat4::Identity());

  BoxState out;
  out.mean = s.mean + gain * innovation;
  const Mat8 ikh = Mat8::Identity() - gain * h;
  // Joseph form keeps the covariance symmetric PSD.
  out.cov = ikh * s.cov * ikh.transpose() + gain * r * gain.transpose();
  return out;
}

}  // namespace vegtrack
