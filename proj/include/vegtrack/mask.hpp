#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vegtrack {

// Inclusive pixel-coordinate rectangle.
struct PixelBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;
};

// Binary instance mask. Rows are bit-packed into 64-bit words; padding bits
// past `width` are kept zero so whole-word operations (popcount, equality)
// are valid.
class MaskRaster {
 public:
  MaskRaster() = default;
  MaskRaster(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }

  bool at(int y, int x) const {
    std::size_t i = word_index(y, x);
    return (words_[i] >> (x & 63)) & 1u;
  }

  void set(int y, int x, bool v) {
    std::size_t i = word_index(y, x);
    std::uint64_t bit = std::uint64_t{1} << (x & 63);
    if (v)
      words_[i] |= bit;
    else
      words_[i] &= ~bit;
  }

  // Number of foreground pixels.
  std::size_t area() const;

  // Tight bounding box of the foreground; nullopt for an empty mask.
  std::optional<PixelBox> tight_bbox() const;

  int words_per_row() const { return words_per_row_; }
  std::span<const std::uint64_t> row_words(int y) const {
    return {words_.data() + static_cast<std::size_t>(y) * words_per_row_,
            static_cast<std::size_t>(words_per_row_)};
  }

  bool operator==(const MaskRaster&) const = default;

 private:
  std::size_t word_index(int y, int x) const {
    return static_cast<std::size_t>(y) * words_per_row_ + (x >> 6);
  }

  int height_ = 0;
  int width_ = 0;
  int words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

// Pixel count of the intersection of two same-sized masks.
std::size_t mask_intersection_area(const MaskRaster& a, const MaskRaster& b);

// Jaccard overlap of two same-sized masks; 0 when both are empty.
double mask_iou(const MaskRaster& a, const MaskRaster& b);

// Keeps only the largest 8-connected foreground component (ties broken by
// scan order: topmost, then leftmost first pixel). Empty masks pass through.
MaskRaster largest_component(const MaskRaster& mask);

// Component count plus the topmost-then-leftmost pixel and area of the
// largest 8-connected component; components == 0 for an empty mask.
struct ComponentStart {
  int components = 0;
  std::size_t area = 0;
  int y = -1;
  int x = -1;
};
ComponentStart largest_component_start(const MaskRaster& mask);

// Mask shifted by (dx, dy); pixels shifted outside the grid are dropped.
MaskRaster translate_mask(const MaskRaster& mask, int dx, int dy);

}  // namespace vegtrack
