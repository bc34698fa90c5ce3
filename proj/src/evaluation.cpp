#include "vegtrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "vegtrack/association.hpp"

namespace vegtrack {
namespace {

// Max-total-IoU one-to-one matching among pairs with iou >= alpha, reusing
// the assignment solver on negated scores.
std::vector<std::pair<int, int>> match_from_iou(const std::vector<std::vector<double>>& iou,
                                                double alpha) {
  const int gn = static_cast<int>(iou.size());
  const int pn = gn ? static_cast<int>(iou[0].size()) : 0;
  std::vector<std::pair<int, int>> pairs;
  if (gn == 0 || pn == 0) return pairs;
  std::vector<std::int64_t> row_ids(static_cast<std::size_t>(gn));
  for (int g = 0; g < gn; ++g) row_ids[static_cast<std::size_t>(g)] = g;
  CostMatrix m(row_ids, pn);
  for (int g = 0; g < gn; ++g)
    for (int p = 0; p < pn; ++p)
      if (iou[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)] >= alpha)
        m.cost(g, p) = -iou[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
  Assignment a = solve_assignment(m);
  pairs.reserve(a.matches.size());
  for (auto [g, p] : a.matches) pairs.emplace_back(static_cast<int>(g), p);
  return pairs;
}

double jaccard_combine(double re, double pr) {
  const double denom = re + pr - re * pr;
  return denom > 0 ? re * pr / denom : 0.0;
}

struct FrameData {
  std::vector<std::int64_t> gt_ids, pred_ids;
  std::vector<std::vector<double>> iou;  // gt x pred
};

}  // namespace

FrameMatch frame_match(std::span<const MaskRaster> gt, std::span<const MaskRaster> pred,
                       double alpha_loc) {
  std::vector<std::vector<double>> iou(gt.size(), std::vector<double>(pred.size(), 0.0));
  for (std::size_t g = 0; g < gt.size(); ++g)
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (gt[g].height() != pred[p].height() || gt[g].width() != pred[p].width())
        throw DimensionMismatch("frame_match: mask dimensions differ");
      iou[g][p] = mask_iou(gt[g], pred[p]);
    }
  FrameMatch out;
  out.pairs = match_from_iou(iou, alpha_loc);
  std::vector<char> gm(gt.size(), 0), pm(pred.size(), 0);
  for (auto [g, p] : out.pairs) {
    gm[static_cast<std::size_t>(g)] = 1;
    pm[static_cast<std::size_t>(p)] = 1;
  }
  for (std::size_t g = 0; g < gt.size(); ++g)
    if (!gm[g]) out.unmatched_gt.push_back(static_cast<int>(g));
  for (std::size_t p = 0; p < pred.size(); ++p)
    if (!pm[p]) out.unmatched_pred.push_back(static_cast<int>(p));
  return out;
}

MetricsReport evaluate(const FrameSeries& gt, const FrameSeries& pred) {
  std::set<std::int64_t> gt_frames;
  for (const auto& f : gt.frames) gt_frames.insert(f.frame_id);
  for (const auto& f : pred.frames)
    if (!gt_frames.count(f.frame_id))
      throw FrameRangeMismatch("evaluate: pred frame " + std::to_string(f.frame_id) +
                               " not present in ground truth");

  std::map<std::int64_t, const Frame*> pred_by_id;
  for (const auto& f : pred.frames) pred_by_id[f.frame_id] = &f;

  // Decode masks once and cache bbox-prefiltered IoU matrices per frame.
  std::vector<FrameData> frames;
  std::map<std::int64_t, std::int64_t> gt_count, pred_count;
  frames.reserve(gt.frames.size());
  for (const auto& gf : gt.frames) {
    FrameData fd;
    std::vector<MaskRaster> gt_masks, pred_masks;
    std::vector<PixelBox> gt_boxes, pred_boxes;
    for (const auto& a : gf.annotations) {
      fd.gt_ids.push_back(a.object_id);
      gt_masks.push_back(a.decode());
      ++gt_count[a.object_id];
    }
    auto it = pred_by_id.find(gf.frame_id);
    if (it != pred_by_id.end()) {
      for (const auto& a : it->second->annotations) {
        fd.pred_ids.push_back(a.object_id);
        pred_masks.push_back(a.decode());
        ++pred_count[a.object_id];
      }
    }
    for (const auto& m : gt_masks) gt_boxes.push_back(m.tight_bbox().value_or(PixelBox{}));
    for (const auto& m : pred_masks) pred_boxes.push_back(m.tight_bbox().value_or(PixelBox{}));
    fd.iou.assign(gt_masks.size(), std::vector<double>(pred_masks.size(), 0.0));
    for (std::size_t g = 0; g < gt_masks.size(); ++g)
      for (std::size_t p = 0; p < pred_masks.size(); ++p) {
        if (gt_masks[g].height() != pred_masks[p].height() ||
            gt_masks[g].width() != pred_masks[p].width())
          throw DimensionMismatch("evaluate: mask dimensions differ in frame " +
                                  std::to_string(gf.frame_id));
        const auto& gb = gt_boxes[g];
        const auto& pb = pred_boxes[p];
        if (gb.x_max < pb.x_min || pb.x_max < gb.x_min || gb.y_max < pb.y_min ||
            pb.y_max < gb.y_min)
          continue;  // disjoint bboxes, IoU stays 0
        fd.iou[g][p] = mask_iou(gt_masks[g], pred_masks[p]);
      }
    frames.push_back(std::move(fd));
  }

  std::int64_t total_gt = 0, total_pred = 0;
  for (auto& [id, n] : gt_count) total_gt += n;
  for (auto& [id, n] : pred_count) total_pred += n;

  MetricsReport report;
  for (int step = 1; step <= 19; ++step) {
    const double alpha = 0.05 * step;
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> pair_count;
    std::int64_t tp = 0;
    for (const auto& fd : frames) {
      for (auto [g, p] : match_from_iou(fd.iou, alpha)) {
        ++pair_count[{fd.gt_ids[static_cast<std::size_t>(g)],
                      fd.pred_ids[static_cast<std::size_t>(p)]}];
        ++tp;
      }
    }
    ThresholdRow row;
    row.alpha_loc = alpha;
    row.tp = tp;
    row.fn = total_gt - tp;
    row.fp = total_pred - tp;
    const std::int64_t denom = row.tp + row.fn + row.fp;
    row.det_a = denom > 0 ? static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
    if (tp > 0) {
      double sum_re = 0, sum_pr = 0;
      for (const auto& [pair, cnt] : pair_count) {
        const double tpa = static_cast<double>(cnt);
        sum_re += tpa * (tpa / static_cast<double>(gt_count[pair.first]));
        sum_pr += tpa * (tpa / static_cast<double>(pred_count[pair.second]));
      }
      row.ass_re = sum_re / static_cast<double>(tp);
      row.ass_pr = sum_pr / static_cast<double>(tp);
      row.ass_a = jaccard_combine(row.ass_re, row.ass_pr);
    }
    row.hota = std::sqrt(row.det_a * row.ass_a);
    report.per_threshold.push_back(row);
  }

  for (const auto& row : report.per_threshold) {
    report.hota += row.hota;
    report.det_a += row.det_a;
    report.ass_a += row.ass_a;
    report.ass_re += row.ass_re;
    report.ass_pr += row.ass_pr;
  }
  const double scale = 100.0 / static_cast<double>(report.per_threshold.size());
  report.hota *= scale;
  report.det_a *= scale;
  report.ass_a *= scale;
  report.ass_re *= scale;
  report.ass_pr *= scale;
  return report;
}

std::string format_report(const MetricsReport& report, bool per_threshold) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "HOTA " << report.hota << "  DetA " << report.det_a << "  AssA "
      << report.ass_a << "  AssRe " << report.ass_re << "  AssPr " << report.ass_pr
      << "\n";
  if (per_threshold) {
    out << "alpha    TP    FN    FP   DetA   AssA  AssRe  AssPr   HOTA\n";
    for (const auto& r : report.per_threshold) {
      out.precision(2);
      out << r.alpha_loc << "  ";
      out.precision(4);
      out << r.tp << "  " << r.fn << "  " << r.fp << "  " << r.det_a << " "
          << r.ass_a << " " << r.ass_re << " " << r.ass_pr << " " << r.hota << "\n";
    }
  }
  return out.str();
}

}  // namespace vegtrack
