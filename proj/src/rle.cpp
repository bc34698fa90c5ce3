#include "vegtrack/rle.hpp"

#include <cstdint>
#include <vector>

namespace vegtrack {
namespace {

void append_count(std::string& out, long value) {
  bool more = true;
  while (more) {
    char c = static_cast<char>(value & 0x1f);
    value >>= 5;
    more = (c & 0x10) ? value != -1 : value != 0;
    if (more) c |= 0x20;
    out.push_back(static_cast<char>(c + 48));
  }
}

std::vector<std::int64_t> parse_counts(std::string_view rle) {
  std::vector<std::int64_t> counts;
  std::size_t k = 0;
  while (k < rle.size()) {
    std::int64_t x = 0;
    int group = 0;
    bool more = true;
    while (more) {
      if (k >= rle.size())
        throw MalformedRle("rle: truncated continuation sequence");
      char raw = rle[k];
      if (raw < 48 || raw > 111)
        throw MalformedRle("rle: character code outside [48, 111]");
      std::int64_t c = raw - 48;
      x |= (c & 0x1f) << (5 * group);
      more = (c & 0x20) != 0;
      ++k;
      ++group;
      if (!more && (c & 0x10)) x |= std::int64_t{-1} << (5 * group);
    }
    if (counts.size() > 2) x += counts[counts.size() - 2];
    if (x < 0) throw MalformedRle("rle: negative run length");
    counts.push_back(x);
  }
  return counts;
}

void check_run_sum(const std::vector<std::int64_t>& counts, int height, int width) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  if (total != static_cast<std::int64_t>(height) * width)
    throw MalformedRle("rle: run sum does not match height*width");
}

}  // namespace

std::string encode_rle(const MaskRaster& mask) {
  std::vector<std::int64_t> counts;
  std::int64_t run = 0;
  bool value = false;
  for (int x = 0; x < mask.width(); ++x) {
    for (int y = 0; y < mask.height(); ++y) {
      bool v = mask.at(y, x);
      if (v != value) {
        counts.push_back(run);
        run = 0;
        value = v;
      }
      ++run;
    }
  }
  counts.push_back(run);

  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::int64_t x = counts[i];
    if (i > 2) x -= counts[i - 2];
    append_count(out, static_cast<long>(x));
  }
  return out;
}

MaskRaster decode_rle(std::string_view rle, int height, int width) {
  if (height < 1 || width < 1)
    throw MalformedRle("rle: dimensions must be >= 1");
  auto counts = parse_counts(rle);
  check_run_sum(counts, height, width);
  MaskRaster mask(height, width);
  std::int64_t pos = 0;
  bool value = false;
  for (std::int64_t c : counts) {
    if (value) {
      for (std::int64_t j = 0; j < c; ++j) {
        std::int64_t p = pos + j;
        mask.set(static_cast<int>(p % height), static_cast<int>(p / height), true);
      }
    }
    pos += c;
    value = !value;
  }
  return mask;
}

void validate_rle(std::string_view rle, int height, int width) {
  if (height < 1 || width < 1)
    throw MalformedRle("rle: dimensions must be >= 1");
  check_run_sum(parse_counts(rle), height, width);
}

}  // namespace vegtrack
