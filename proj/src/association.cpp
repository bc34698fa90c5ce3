#include "vegtrack/association.hpp"

#include <algorithm>
#include <cmath>

namespace vegtrack {

Track& TrackStore::create(const BBox& box, const BoxState& state,
                          std::optional<ShapeFeature> shape,
                          std::int64_t frame_id) {
  Track t;
  t.id = next_id();
  t.active = true;
  t.box_state = state;
  t.last_box = box;
  t.shape = std::move(shape);
  t.last_seen_frame = frame_id;
  tracks_.push_back(std::move(t));
  return tracks_.back();
}

double position_cost(const BBox& predicted, const BBox& detected) {
  return -giou(predicted, detected);
}

double shape_cost(const ShapeFeature& prev, const ShapeFeature& cur) {
  if (prev.values.size() != cur.values.size())
    throw std::invalid_argument("shape_cost: feature length mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < prev.values.size(); ++i) {
    dot += prev.values[i] * cur.values[i];
    na += prev.values[i] * prev.values[i];
    nb += cur.values[i] * cur.values[i];
  }
  if (na == 0 || nb == 0)
    throw ZeroVector("shape_cost: zero feature vector");
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

double overall_cost(double delta_s, double delta_p, double alpha) {
  return delta_s * (1.0 + alpha * delta_p);
}

std::vector<std::int64_t> candidate_window(const TrackStore& store,
                                           std::span<const std::int64_t> prev_matched_ids,
                                           std::int64_t slack) {
  std::vector<std::int64_t> out;
  if (prev_matched_ids.empty()) return out;
  std::int64_t lo = prev_matched_ids[0], hi = prev_matched_ids[0];
  for (std::int64_t id : prev_matched_ids) {
    lo = std::min(lo, id);
    hi = std::max(hi, id);
  }
  lo = std::max<std::int64_t>(0, lo - slack);
  hi = std::min(hi + slack, store.next_id() - 1);
  for (std::int64_t id = lo; id <= hi; ++id) out.push_back(id);
  return out;
}

CostMatrix::CostMatrix(std::vector<std::int64_t> row_ids, int cols)
    : row_ids_(std::move(row_ids)), cols_(cols) {
  const std::size_t n = row_ids_.size() * static_cast<std::size_t>(cols_);
  cost_.assign(n, kForbidden);
  delta_p_.assign(n, 0.0);
  delta_s_.assign(n, 0.0);
}

CostMatrix build_cost_matrix(std::span<const CandidateView> candidates,
                             std::span<const DetectionView> detections,
                             const AssociationParams& params) {
  std::vector<std::int64_t> ids;
  ids.reserve(candidates.size());
  for (const auto& c : candidates) ids.push_back(c.id);
  CostMatrix m(std::move(ids), static_cast<int>(detections.size()));

  for (int r = 0; r < m.rows(); ++r) {
    const auto& cand = candidates[static_cast<std::size_t>(r)];
    for (int c = 0; c < m.cols(); ++c) {
      const auto& det = detections[static_cast<std::size_t>(c)];
      const double dp = position_cost(cand.gate_box, det.box);
      double ds, alpha;
      if (cand.shape && det.shape) {
        ds = shape_cost(*cand.shape, *det.shape);
        alpha = cand.active ? 1.0 : 0.0;
      } else {
        // No comparable shapes: position-only matching at a fixed shape
        // cost, with the position term always engaged.
        ds = params.fallback_shape_cost;
        alpha = 1.0;
      }
      const double delta = overall_cost(ds, dp, alpha);
      m.delta_p(r, c) = dp;
      m.delta_s(r, c) = ds;
      if (delta < params.t_all && dp < params.t_p) m.cost(r, c) = delta;
    }
  }
  return m;
}

namespace {

// Hungarian algorithm with potentials on an n x m grid, n <= m (1-based).
// Returns match[j] = row assigned to column j (0 = none).
std::vector<int> hungarian(const std::vector<std::vector<double>>& a, int n, int m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        double cur = a[static_cast<std::size_t>(i0)][static_cast<std::size_t>(j)] -
                     u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  return p;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& m) {
  Assignment out;
  const int rows = m.rows();
  const int cols = m.cols();
  if (rows == 0 || cols == 0) {
    for (int r = 0; r < rows; ++r) out.unmatched_rows.push_back(m.row_ids()[static_cast<std::size_t>(r)]);
    for (int c = 0; c < cols; ++c) out.unmatched_cols.push_back(c);
    return out;
  }

  // Forbidden cells become a finite sentinel exceeding any possible total of
  // real cells, so the solver stays purely numeric; sentinel matches are
  // stripped afterwards.
  double max_finite = 0.0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (m.cost(r, c) != CostMatrix::kForbidden)
        max_finite = std::max(max_finite, std::abs(m.cost(r, c)));
  const double sentinel = max_finite * rows * cols + 1.0;

  // Orient so that the solved side has rows <= cols; pad with zero-cost
  // dummy rows (their contribution is constant).
  const bool transposed = rows > cols;
  const int n = transposed ? cols : rows;
  const int mm = transposed ? rows : cols;
  std::vector<std::vector<double>> a(
      static_cast<std::size_t>(mm) + 1,
      std::vector<double>(static_cast<std::size_t>(mm) + 1, 0.0));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= mm; ++j) {
      const int r = transposed ? j - 1 : i - 1;
      const int c = transposed ? i - 1 : j - 1;
      const double cell = m.cost(r, c);
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          cell == CostMatrix::kForbidden ? sentinel : cell;
    }

  auto p = hungarian(a, mm, mm);

  std::vector<char> row_matched(static_cast<std::size_t>(rows), 0);
  std::vector<char> col_matched(static_cast<std::size_t>(cols), 0);
  for (int j = 1; j <= mm; ++j) {
    const int i = p[static_cast<std::size_t>(j)];
    if (i == 0 || i > n) continue;  // dummy row
    const int r = transposed ? j - 1 : i - 1;
    const int c = transposed ? i - 1 : j - 1;
    if (m.cost(r, c) == CostMatrix::kForbidden) continue;
    out.matches.emplace_back(m.row_ids()[static_cast<std::size_t>(r)], c);
    row_matched[static_cast<std::size_t>(r)] = 1;
    col_matched[static_cast<std::size_t>(c)] = 1;
  }
  std::sort(out.matches.begin(), out.matches.end());
  for (int r = 0; r < rows; ++r)
    if (!row_matched[static_cast<std::size_t>(r)])
      out.unmatched_rows.push_back(m.row_ids()[static_cast<std::size_t>(r)]);
  for (int c = 0; c < cols; ++c)
    if (!col_matched[static_cast<std::size_t>(c)]) out.unmatched_cols.push_back(c);
  return out;
}

}  // namespace vegtrack
