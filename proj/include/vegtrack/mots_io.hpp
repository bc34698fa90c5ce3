#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vegtrack/mask.hpp"

namespace vegtrack {

struct MalformedLine : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DuplicateObjectInFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One mask occurrence. Category 1 is the plant class; records with other
// categories are carried through I/O untouched but ignored by the tracker.
struct Annotation {
  std::int64_t frame_id = 0;
  std::int64_t object_id = 0;
  int category = 1;
  int image_height = 0;
  int image_width = 0;
  std::string rle;

  MaskRaster decode() const;
};

struct Frame {
  std::int64_t frame_id = 0;
  std::vector<Annotation> annotations;
};

// Frames ordered by strictly increasing frame_id; object ids are unique
// within each frame.
struct FrameSeries {
  std::vector<Frame> frames;

  bool empty() const { return frames.empty(); }
};

// Parses one record of the form
//   frame_id object_id category image_height image_width rle
// Numeric fields must be non-negative integers; the RLE payload is
// validated against the stated dimensions (MalformedRle on defects).
Annotation parse_annotation_line(std::string_view line);

// Inverse of parse_annotation_line for canonical (single-space) records.
// No trailing newline.
std::string write_annotation_line(const Annotation& a);

// Reads records line by line, groups them by frame and sorts frames by id.
// Blank lines are skipped. Duplicate (frame_id, object_id) pairs raise
// DuplicateObjectInFrame.
FrameSeries load_sequence(std::istream& in);
FrameSeries load_sequence_file(const std::string& path);

void save_sequence(std::ostream& out, const FrameSeries& series);
void save_sequence_file(const std::string& path, const FrameSeries& series);

}  // namespace vegtrack
