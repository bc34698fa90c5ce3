#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vegtrack/motion_model.hpp"
#include "vegtrack/shape_features.hpp"

namespace vegtrack {

struct ZeroVector : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Persistent identity. `active` means the track was matched (or created)
// in the previous frame; inactive tracks keep the box from the last frame
// in which the plant was seen.
struct Track {
  std::int64_t id = 0;
  bool active = false;
  BoxState box_state;
  BBox last_box;
  std::optional<ShapeFeature> shape;
  std::int64_t last_seen_frame = -1;
};

// Every track ever created, indexed by id; ids are issued sequentially in
// creation order.
class TrackStore {
 public:
  Track& create(const BBox& box, const BoxState& state,
                std::optional<ShapeFeature> shape, std::int64_t frame_id);

  std::int64_t next_id() const { return static_cast<std::int64_t>(tracks_.size()); }
  bool contains(std::int64_t id) const {
    return id >= 0 && id < next_id();
  }
  Track& at(std::int64_t id) { return tracks_[static_cast<std::size_t>(id)]; }
  const Track& at(std::int64_t id) const {
    return tracks_[static_cast<std::size_t>(id)];
  }
  const std::vector<Track>& all() const { return tracks_; }

 private:
  std::vector<Track> tracks_;
};

struct AssociationParams {
  double t_all = 0.1;
  double t_p = 0.4;
  double fallback_shape_cost = 0.05;
};

// delta_p = -GIoU(predicted, detected), in [-1, 1).
double position_cost(const BBox& predicted, const BBox& detected);

// Cosine distance 1 - <a,b>/(|a||b|); features must be nonzero.
double shape_cost(const ShapeFeature& prev, const ShapeFeature& cur);

// delta = delta_s * (1 + alpha * delta_p); alpha is 1 for active tracks,
// 0 for inactive ones.
double overall_cost(double delta_s, double delta_p, double alpha);

// Ids of all stored tracks inside [min(prev) - slack, max(prev) + slack],
// clamped below at 0. Inactive tracks are included (they are the re-ID
// candidates). Empty input yields an empty window.
std::vector<std::int64_t> candidate_window(const TrackStore& store,
                                           std::span<const std::int64_t> prev_matched_ids,
                                           std::int64_t slack);

// Row-side view of one candidate track: gate_box is the Kalman-predicted
// box for active tracks and the frozen last_box for inactive ones. A null
// shape selects the position-only fallback cost.
struct CandidateView {
  std::int64_t id = 0;
  bool active = false;
  BBox gate_box;
  const ShapeFeature* shape = nullptr;
};

struct DetectionView {
  BBox box;
  const ShapeFeature* shape = nullptr;
};

class CostMatrix {
 public:
  static constexpr double kForbidden = std::numeric_limits<double>::infinity();

  CostMatrix() = default;
  CostMatrix(std::vector<std::int64_t> row_ids, int cols);

  int rows() const { return static_cast<int>(row_ids_.size()); }
  int cols() const { return cols_; }
  const std::vector<std::int64_t>& row_ids() const { return row_ids_; }

  double& cost(int r, int c) { return cost_[index(r, c)]; }
  double cost(int r, int c) const { return cost_[index(r, c)]; }
  double& delta_p(int r, int c) { return delta_p_[index(r, c)]; }
  double delta_p(int r, int c) const { return delta_p_[index(r, c)]; }
  double& delta_s(int r, int c) { return delta_s_[index(r, c)]; }
  double delta_s(int r, int c) const { return delta_s_[index(r, c)]; }

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  std::vector<std::int64_t> row_ids_;
  int cols_ = 0;
  std::vector<double> cost_;
  std::vector<double> delta_p_;
  std::vector<double> delta_s_;
};

// Fills every (candidate, detection) cell; cells failing either gate
// (delta < t_all, delta_p < t_p) hold kForbidden.
CostMatrix build_cost_matrix(std::span<const CandidateView> candidates,
                             std::span<const DetectionView> detections,
                             const AssociationParams& params);

struct Assignment {
  std::vector<std::pair<std::int64_t, int>> matches;  // (track id, detection)
  std::vector<std::int64_t> unmatched_rows;           // track ids
  std::vector<int> unmatched_cols;                    // detection indices
};

// Minimum-total-cost assignment over finite cells (Hungarian algorithm).
// Maximizes the number of finite matches first; rows are processed in
// ascending track-id order so equal-cost solutions resolve deterministically
// toward lower ids. Forbidden cells never appear in a returned match.
Assignment solve_assignment(const CostMatrix& m);

}  // namespace vegtrack
