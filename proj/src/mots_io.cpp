#include "vegtrack/mots_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vegtrack/rle.hpp"

namespace vegtrack {
namespace {

std::int64_t parse_nonneg_int(std::string_view token, std::string_view field) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw MalformedLine("annotation: field '" + std::string(field) +
                        "' is not an integer: '" + std::string(token) + "'");
  if (value < 0)
    throw MalformedLine("annotation: field '" + std::string(field) +
                        "' is negative");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

MaskRaster Annotation::decode() const {
  return decode_rle(rle, image_height, image_width);
}

Annotation parse_annotation_line(std::string_view line) {
  auto fields = split_ws(line);
  if (fields.size() != 6)
    throw MalformedLine("annotation: expected 6 fields, got " +
                        std::to_string(fields.size()));
  Annotation a;
  a.frame_id = parse_nonneg_int(fields[0], "frame_id");
  a.object_id = parse_nonneg_int(fields[1], "object_id");
  a.category = static_cast<int>(parse_nonneg_int(fields[2], "category"));
  a.image_height = static_cast<int>(parse_nonneg_int(fields[3], "image_height"));
  a.image_width = static_cast<int>(parse_nonneg_int(fields[4], "image_width"));
  a.rle = std::string(fields[5]);
  validate_rle(a.rle, a.image_height, a.image_width);
  return a;
}

std::string write_annotation_line(const Annotation& a) {
  std::ostringstream out;
  out << a.frame_id << ' ' << a.object_id << ' ' << a.category << ' '
      << a.image_height << ' ' << a.image_width << ' ' << a.rle;
  return out.str();
}

FrameSeries load_sequence(std::istream& in) {
  std::map<std::int64_t, Frame> by_frame;
  std::map<std::int64_t, std::set<std::int64_t>> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank) continue;
    Annotation a;
    try {
      a = parse_annotation_line(line);
    } catch (const MalformedLine& e) {
      throw MalformedLine("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const MalformedRle& e) {
      throw MalformedRle("line " + std::to_string(line_no) + ": " + e.what());
    }
    auto& ids = seen_ids[a.frame_id];
    if (!ids.insert(a.object_id).second)
      throw DuplicateObjectInFrame(
          "line " + std::to_string(line_no) + ": object " +
          std::to_string(a.object_id) + " appears twice in frame " +
          std::to_string(a.frame_id));
    auto& frame = by_frame[a.frame_id];
    frame.frame_id = a.frame_id;
    frame.annotations.push_back(std::move(a));
  }
  FrameSeries series;
  series.frames.reserve(by_frame.size());
  for (auto& [id, frame] : by_frame) series.frames.push_back(std::move(frame));
  return series;
}

FrameSeries load_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path);
  return load_sequence(in);
}

void save_sequence(std::ostream& out, const FrameSeries& series) {
  for (const auto& frame : series.frames)
    for (const auto& a : frame.annotations)
      out << write_annotation_line(a) << '\n';
}

void save_sequence_file(const std::string& path, const FrameSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_sequence(out, series);
}

}  // namespace vegtrack
