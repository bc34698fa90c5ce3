#include "vegtrack/mask.hpp"

#include <algorithm>
#include <stdexcept>

namespace vegtrack {

MaskRaster::MaskRaster(int height, int width)
    : height_(height), width_(width), words_per_row_((width + 63) / 64) {
  if (height < 1 || width < 1)
    throw std::invalid_argument("MaskRaster: dimensions must be >= 1");
  words_.assign(static_cast<std::size_t>(height_) * words_per_row_, 0);
}

std::size_t MaskRaster::area() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::optional<PixelBox> MaskRaster::tight_bbox() const {
  int y_min = -1, y_max = -1;
  std::vector<std::uint64_t> col_or(static_cast<std::size_t>(words_per_row_), 0);
  for (int y = 0; y < height_; ++y) {
    auto row = row_words(y);
    bool any = false;
    for (int w = 0; w < words_per_row_; ++w) {
      if (row[w]) {
        any = true;
        col_or[static_cast<std::size_t>(w)] |= row[w];
      }
    }
    if (any) {
      if (y_min < 0) y_min = y;
      y_max = y;
    }
  }
  if (y_min < 0) return std::nullopt;
  int x_min = -1, x_max = -1;
  for (int w = 0; w < words_per_row_; ++w) {
    std::uint64_t v = col_or[static_cast<std::size_t>(w)];
    if (!v) continue;
    int lo = w * 64 + std::countr_zero(v);
    int hi = w * 64 + 63 - std::countl_zero(v);
    if (x_min < 0) x_min = lo;
    x_max = hi;
  }
  return PixelBox{x_min, y_min, x_max, y_max};
}

std::size_t mask_intersection_area(const MaskRaster& a, const MaskRaster& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw std::invalid_argument("mask_intersection_area: size mismatch");
  std::size_t n = 0;
  for (int y = 0; y < a.height(); ++y) {
    auto ra = a.row_words(y);
    auto rb = b.row_words(y);
    for (std::size_t w = 0; w < ra.size(); ++w)
      n += static_cast<std::size_t>(std::popcount(ra[w] & rb[w]));
  }
  return n;
}

double mask_iou(const MaskRaster& a, const MaskRaster& b) {
  std::size_t inter = mask_intersection_area(a, b);
  std::size_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

struct Run {
  int y, x0, x1;
  int parent;
};

int find_root(std::vector<Run>& runs, int i) {
  while (runs[static_cast<std::size_t>(i)].parent != i) {
    auto& r = runs[static_cast<std::size_t>(i)];
    r.parent = runs[static_cast<std::size_t>(r.parent)].parent;
    i = r.parent;
  }
  return i;
}

// Row runs of set bits extracted word-wise, merged across rows (8-connected)
// with union-find. Run order is row-major, so root indices follow scan order.
std::vector<Run> scan_runs(const MaskRaster& mask, const PixelBox& bbox) {
  std::vector<Run> runs;
  int prev_begin = 0, prev_end = 0;
  for (int y = bbox.y_min; y <= bbox.y_max; ++y) {
    const int row_begin = static_cast<int>(runs.size());
    auto row = mask.row_words(y);
    int open_start = -1;
    for (int wi = 0; wi < mask.words_per_row(); ++wi) {
      const std::uint64_t w = row[static_cast<std::size_t>(wi)];
      const int base = wi * 64;
      if (open_start >= 0 && w == ~std::uint64_t{0}) continue;
      if (open_start < 0 && w == 0) continue;
      int bit = 0;
      while (bit < 64) {
        if (open_start >= 0) {
          const std::uint64_t inv = ~w >> bit;
          if (inv == 0) break;  // run continues into the next word
          const int adv = std::countr_zero(inv);
          runs.push_back({y, open_start, base + bit + adv - 1,
                          static_cast<int>(runs.size())});
          open_start = -1;
          bit += adv;
        } else {
          const std::uint64_t rem = w >> bit;
          if (rem == 0) break;
          bit += std::countr_zero(rem);
          open_start = base + bit;
        }
      }
    }
    if (open_start >= 0)
      runs.push_back({y, open_start, mask.width() - 1, static_cast<int>(runs.size())});
    const int row_end = static_cast<int>(runs.size());

    int j = prev_begin;
    for (int i = row_begin; i < row_end; ++i) {
      while (j < prev_end && runs[static_cast<std::size_t>(j)].x1 <
                                 runs[static_cast<std::size_t>(i)].x0 - 1)
        ++j;
      for (int k = j; k < prev_end && runs[static_cast<std::size_t>(k)].x0 <=
                                          runs[static_cast<std::size_t>(i)].x1 + 1;
           ++k) {
        int ri = find_root(runs, i);
        int rk = find_root(runs, k);
        if (ri != rk) {
          int lo = std::min(ri, rk), hi = std::max(ri, rk);
          runs[static_cast<std::size_t>(hi)].parent = lo;
        }
      }
    }
    prev_begin = row_begin;
    prev_end = row_end;
  }
  return runs;
}

struct Pick {
  int components = 0;
  std::size_t area = 0;
  int root = -1;
  std::vector<Run> runs;
};

Pick pick_largest(const MaskRaster& mask, const PixelBox& bbox) {
  Pick pick;
  pick.runs = scan_runs(mask, bbox);
  auto& runs = pick.runs;
  std::vector<std::size_t> area(runs.size(), 0);
  for (int i = 0; i < static_cast<int>(runs.size()); ++i) {
    int root = find_root(runs, i);
    if (root == i) ++pick.components;
    const auto& r = runs[static_cast<std::size_t>(i)];
    area[static_cast<std::size_t>(root)] += static_cast<std::size_t>(r.x1 - r.x0 + 1);
  }
  for (int i = 0; i < static_cast<int>(runs.size()); ++i) {
    if (runs[static_cast<std::size_t>(i)].parent != i) continue;
    if (area[static_cast<std::size_t>(i)] > pick.area) {
      pick.area = area[static_cast<std::size_t>(i)];
      pick.root = i;
    }
  }
  return pick;
}

}  // namespace

ComponentStart largest_component_start(const MaskRaster& mask) {
  ComponentStart out;
  auto bbox = mask.tight_bbox();
  if (!bbox) return out;
  Pick pick = pick_largest(mask, *bbox);
  out.components = pick.components;
  out.area = pick.area;
  if (pick.root >= 0) {
    // root indices follow scan order and the root run is the first run of
    // its component, so its left end is the topmost-then-leftmost pixel
    out.y = pick.runs[static_cast<std::size_t>(pick.root)].y;
    out.x = pick.runs[static_cast<std::size_t>(pick.root)].x0;
  }
  return out;
}

MaskRaster largest_component(const MaskRaster& mask) {
  auto bbox = mask.tight_bbox();
  if (!bbox) return mask;
  Pick pick = pick_largest(mask, *bbox);
  if (pick.components <= 1) return mask;
  MaskRaster out(mask.height(), mask.width());
  auto& runs = pick.runs;
  for (int i = 0; i < static_cast<int>(runs.size()); ++i) {
    if (find_root(runs, i) != pick.root) continue;
    const auto& r = runs[static_cast<std::size_t>(i)];
    for (int x = r.x0; x <= r.x1; ++x) out.set(r.y, x, true);
  }
  return out;
}

MaskRaster translate_mask(const MaskRaster& mask, int dx, int dy) {
  MaskRaster out(mask.height(), mask.width());
  auto bbox = mask.tight_bbox();
  if (!bbox) return out;
  for (int y = bbox->y_min; y <= bbox->y_max; ++y) {
    int ny = y + dy;
    if (ny < 0 || ny >= mask.height()) continue;
    for (int x = bbox->x_min; x <= bbox->x_max; ++x) {
      if (!mask.at(y, x)) continue;
      int nx = x + dx;
      if (nx < 0 || nx >= mask.width()) continue;
      out.set(ny, nx, true);
    }
  }
  return out;
}

}  // namespace vegtrack
