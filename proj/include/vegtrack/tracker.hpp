#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vegtrack/association.hpp"
#include "vegtrack/mots_io.hpp"

namespace vegtrack {

struct NonMonotonicFrameId : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Which parts of the shape descriptor drive the shape cost. The ablation
// modes match only on the contour spectrum or only on the ellipse pair.
enum class FeatureMode { kCombined, kContourOnly, kBlobOnly };

struct TrackerConfig {
  std::int64_t window_slack = 6;  // s
  double t_all = 0.1;
  double t_p = 0.4;
  int fd_length = 5;
  int border_margin = 2;
  double fallback_shape_cost = 0.05;
  FeatureMode feature_mode = FeatureMode::kCombined;
  KalmanParams kf;
};

struct FrameDetections {
  std::int64_t frame_id = 0;
  std::vector<MaskRaster> masks;
};

struct TrackedInstance {
  std::int64_t object_id = 0;
  BBox box;
  MaskRaster mask;
};

struct TrackedFrame {
  std::int64_t frame_id = 0;
  std::vector<TrackedInstance> instances;
};

struct StepTiming {
  double feature_ms = 0;
  double association_ms = 0;
  double total_ms = 0;
};

// Removes every instance whose bounding box touches rows [0, margin) or
// [H - margin, H): plants at the top or bottom of the image do not appear
// completely and would corrupt the shape features. margin 0 disables the
// filter.
FrameDetections filter_border_instances(FrameDetections dets, int image_height,
                                        int margin);

// Per-frame pipeline: border filter, feature extraction, windowed cost
// matrix, Hungarian matching, track lifecycle and re-identification.
// Frames must be fed in strictly increasing frame_id order.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {});

  TrackedFrame step(FrameDetections dets);

  const TrackStore& store() const { return store_; }
  const TrackerConfig& config() const { return cfg_; }
  const std::vector<StepTiming>& timings() const { return timings_; }

 private:
  std::optional<ShapeFeature> extract_feature(const MaskRaster& mask) const;

  TrackerConfig cfg_;
  TrackStore store_;
  std::vector<std::int64_t> last_matched_ids_;  // last non-empty matched set
  std::int64_t last_frame_ = -1;
  std::vector<StepTiming> timings_;
};

// Batch driver: decodes category-1 annotations frame by frame and runs the
// tracker over them. Output object ids are tracker-assigned.
std::vector<TrackedFrame> run_tracker(const FrameSeries& series,
                                      const TrackerConfig& cfg);

// Tracked frames re-encoded as annotation records (category 1).
FrameSeries tracked_to_series(const std::vector<TrackedFrame>& frames);

}  // namespace vegtrack
