#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "vegtrack/mots_io.hpp"

namespace vegtrack {

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FrameRangeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One-to-one matching of one frame at one localization threshold.
struct FrameMatch {
  std::vector<std::pair<int, int>> pairs;  // (gt index, pred index)
  std::vector<int> unmatched_gt;
  std::vector<int> unmatched_pred;
};

// Matches gt and pred masks one-to-one, maximizing total mask IoU over the
// pairs with IoU >= alpha_loc.
FrameMatch frame_match(std::span<const MaskRaster> gt, std::span<const MaskRaster> pred,
                       double alpha_loc);

// Fractions in [0, 1] at one localization threshold.
struct ThresholdRow {
  double alpha_loc = 0;
  std::int64_t tp = 0, fn = 0, fp = 0;
  double det_a = 0;
  double ass_a = 0;
  double ass_re = 0;
  double ass_pr = 0;
  double hota = 0;
};

// Top-level scores are percentages averaged over the 19 thresholds
// 0.05 .. 0.95. Per threshold, DetA = TP/(TP+FN+FP); AssRe and AssPr are
// means over TP pairs of TPA/(TPA+FNA) and TPA/(TPA+FPA); AssA combines
// them as AssRe*AssPr / (AssRe + AssPr - AssRe*AssPr); HOTA is
// sqrt(DetA * AssA).
struct MetricsReport {
  double hota = 0, det_a = 0, ass_a = 0, ass_re = 0, ass_pr = 0;
  std::vector<ThresholdRow> per_threshold;
};

// Pred frames must be a subset of the gt frame set (a frame absent from
// pred counts as empty); unknown pred frames raise FrameRangeMismatch.
// Mask dimensions must agree within each frame.
MetricsReport evaluate(const FrameSeries& gt, const FrameSeries& pred);

std::string format_report(const MetricsReport& report, bool per_threshold = false);

}  // namespace vegtrack
