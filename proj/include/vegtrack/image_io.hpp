#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "vegtrack/mask.hpp"

namespace vegtrack {

struct ImageIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 8-bit RGB image used for overlays.
struct ImageRgb {
  int height = 0;
  int width = 0;
  std::vector<std::array<std::uint8_t, 3>> pixels;  // row-major

  ImageRgb() = default;
  ImageRgb(int h, int w)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, {0, 0, 0}) {}

  std::array<std::uint8_t, 3>& at(int y, int x) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

// Masks travel as 8-bit single-channel PGM files (binary P5 or ASCII P2):
// pixel value 0 is background, anything else is the instance.
MaskRaster read_mask_pgm(const std::filesystem::path& path);
void write_mask_pgm(const std::filesystem::path& path, const MaskRaster& mask);

// Overlay underlays: binary PPM (P6) or PGM (P5, expanded to gray RGB).
ImageRgb read_image_p6_or_p5(const std::filesystem::path& path);
void write_image_ppm(const std::filesystem::path& path, const ImageRgb& img);

}  // namespace vegtrack
