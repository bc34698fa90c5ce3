#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "vegtrack/mask.hpp"

namespace vegtrack {

// Raised on any defect in an RLE payload: characters outside [48, 111],
// a truncated continuation sequence, negative run lengths after difference
// decoding, or a run sum that does not equal height*width.
struct MalformedRle : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compressed RLE string for a mask. Runs are taken in column-major pixel
// order and alternate background/foreground starting with the (possibly
// zero) leading background count; counts from index 3 on are stored as the
// difference to the count two places earlier; each value is emitted as
// 5-bit groups low-to-high with a continuation flag in bit 5, offset by
// character code 48.
std::string encode_rle(const MaskRaster& mask);

// Inverse of encode_rle. The run stream must cover exactly height*width
// pixels; over- or underflow raises MalformedRle rather than clamping.
MaskRaster decode_rle(std::string_view rle, int height, int width);

// Parses the count stream without materializing a raster. Used to validate
// annotation payloads cheaply; raises MalformedRle on any defect.
void validate_rle(std::string_view rle, int height, int width);

}  // namespace vegtrack
