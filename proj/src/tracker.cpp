#include "vegtrack/tracker.hpp"

#include <algorithm>
#include <chrono>

#include "vegtrack/rle.hpp"

namespace vegtrack {
namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

}  // namespace

FrameDetections filter_border_instances(FrameDetections dets, int image_height,
                                        int margin) {
  if (margin <= 0) return dets;
  std::vector<MaskRaster> kept;
  kept.reserve(dets.masks.size());
  for (auto& mask : dets.masks) {
    auto bbox = mask.tight_bbox();
    if (bbox && (bbox->y_min < margin || bbox->y_max >= image_height - margin))
      continue;
    kept.push_back(std::move(mask));
  }
  dets.masks = std::move(kept);
  return dets;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) {}

std::optional<ShapeFeature> Tracker::extract_feature(const MaskRaster& mask) const {
  try {
    switch (cfg_.feature_mode) {
      case FeatureMode::kCombined:
        return extract_shape_feature(mask, cfg_.fd_length);
      case FeatureMode::kContourOnly: {
        Contour c = trace_contour(mask);
        FourierDescriptor fd = fourier_descriptor(centroid_signature(c), cfg_.fd_length);
        return ShapeFeature{std::move(fd.values)};
      }
      case FeatureMode::kBlobOnly: {
        EllipseFit e = fit_ellipse(trace_contour(mask));
        return ShapeFeature{{e.axis_ratio, e.theta_norm}};
      }
    }
  } catch (const EmptyMask&) {
  } catch (const TooFewPoints&) {
  } catch (const DegenerateSignature&) {
  } catch (const InsufficientPoints&) {
  } catch (const DegenerateGeometry&) {
  }
  return std::nullopt;
}

TrackedFrame Tracker::step(FrameDetections dets) {
  const auto t_total = std::chrono::steady_clock::now();
  if (dets.frame_id <= last_frame_)
    throw NonMonotonicFrameId("tracker: frame " + std::to_string(dets.frame_id) +
                              " after frame " + std::to_string(last_frame_));
  last_frame_ = dets.frame_id;

  int image_height = 0;
  for (const auto& m : dets.masks) {
    if (image_height == 0) image_height = m.height();
    if (m.height() != image_height)
      throw std::invalid_argument("tracker: masks in one frame differ in size");
  }
  dets = filter_border_instances(std::move(dets), image_height, cfg_.border_margin);

  struct Instance {
    MaskRaster mask;
    BBox box;
    std::optional<ShapeFeature> feature;
  };

  const auto t_feat = std::chrono::steady_clock::now();
  std::vector<Instance> instances;
  instances.reserve(dets.masks.size());
  for (auto& mask : dets.masks) {
    auto bbox = mask.tight_bbox();
    if (!bbox) continue;  // nothing to track in an empty mask
    BBox box = BBox::from_pixel_box(*bbox);
    auto feature = extract_feature(mask);
    instances.push_back(Instance{std::move(mask), box, std::move(feature)});
  }
  // New ids are issued top-to-bottom, then left-to-right, so processing the
  // detections in that order makes id assignment reproducible.
  std::sort(instances.begin(), instances.end(), [](const Instance& a, const Instance& b) {
    if (a.box.center_y() != b.box.center_y()) return a.box.center_y() < b.box.center_y();
    return a.box.center_x() < b.box.center_x();
  });
  const double feature_ms = ms_since(t_feat);

  const auto t_assoc = std::chrono::steady_clock::now();
  std::vector<std::int64_t> window =
      candidate_window(store_, last_matched_ids_, cfg_.window_slack);

  std::vector<CandidateView> views;
  std::vector<BoxState> predicted(window.size());
  views.reserve(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    const Track& t = store_.at(window[i]);
    CandidateView v;
    v.id = t.id;
    v.active = t.active;
    if (t.active) {
      auto [state, box] = kf_predict(t.box_state, cfg_.kf);
      predicted[i] = std::move(state);
      v.gate_box = box;
    } else {
      v.gate_box = t.last_box;
    }
    v.shape = t.shape ? &*t.shape : nullptr;
    views.push_back(v);
  }

  std::vector<DetectionView> det_views;
  det_views.reserve(instances.size());
  for (const auto& inst : instances)
    det_views.push_back({inst.box, inst.feature ? &*inst.feature : nullptr});

  AssociationParams assoc{cfg_.t_all, cfg_.t_p, cfg_.fallback_shape_cost};
  CostMatrix matrix = build_cost_matrix(views, det_views, assoc);
  Assignment assignment = solve_assignment(matrix);

  std::vector<std::int64_t> assigned_id(instances.size(), -1);
  std::vector<std::int64_t> matched_ids;
  for (auto [track_id, det] : assignment.matches) {
    Track& t = store_.at(track_id);
    const Instance& inst = instances[static_cast<std::size_t>(det)];
    if (t.active) {
      const std::size_t wi = static_cast<std::size_t>(
          std::find(window.begin(), window.end(), track_id) - window.begin());
      t.box_state = kf_update(predicted[wi], inst.box, cfg_.kf);
    } else {
      // Re-identified after an absence: stale velocity is meaningless, so
      // the filter restarts at the detection box.
      t.box_state = kf_init(inst.box, cfg_.kf);
    }
    t.last_box = inst.box;
    if (inst.feature) t.shape = inst.feature;
    t.last_seen_frame = dets.frame_id;
    assigned_id[static_cast<std::size_t>(det)] = track_id;
    matched_ids.push_back(track_id);
  }

  // Tracks matched in the previous frame but not this one go inactive and
  // keep the box from the last frame in which they were seen.
  for (std::int64_t id = 0; id < store_.next_id(); ++id) {
    Track& t = store_.at(id);
    if (t.active && t.last_seen_frame != dets.frame_id) t.active = false;
  }
  for (auto [track_id, det] : assignment.matches) store_.at(track_id).active = true;

  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (assigned_id[i] >= 0) continue;
    const Instance& inst = instances[i];
    Track& t = store_.create(inst.box, kf_init(inst.box, cfg_.kf), inst.feature,
                             dets.frame_id);
    assigned_id[i] = t.id;
    matched_ids.push_back(t.id);
  }
  if (!matched_ids.empty()) last_matched_ids_ = matched_ids;
  const double association_ms = ms_since(t_assoc);

  TrackedFrame out;
  out.frame_id = dets.frame_id;
  out.instances.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i)
    out.instances.push_back(
        {assigned_id[i], instances[i].box, std::move(instances[i].mask)});
  timings_.push_back({feature_ms, association_ms, ms_since(t_total)});
  return out;
}

std::vector<TrackedFrame> run_tracker(const FrameSeries& series,
                                      const TrackerConfig& cfg) {
  Tracker tracker(cfg);
  std::vector<TrackedFrame> out;
  out.reserve(series.frames.size());
  for (const auto& frame : series.frames) {
    FrameDetections dets;
    dets.frame_id = frame.frame_id;
    for (const auto& a : frame.annotations) {
      if (a.category != 1) continue;
      dets.masks.push_back(a.decode());
    }
    out.push_back(tracker.step(std::move(dets)));
  }
  return out;
}

FrameSeries tracked_to_series(const std::vector<TrackedFrame>& frames) {
  FrameSeries series;
  for (const auto& tf : frames) {
    Frame frame;
    frame.frame_id = tf.frame_id;
    for (const auto& inst : tf.instances) {
      Annotation a;
      a.frame_id = tf.frame_id;
      a.object_id = inst.object_id;
      a.category = 1;
      a.image_height = inst.mask.height();
      a.image_width = inst.mask.width();
      a.rle = encode_rle(inst.mask);
      frame.annotations.push_back(std::move(a));
    }
    series.frames.push_back(std::move(frame));
  }
  return series;
}

}  // namespace vegtrack
