#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vegtrack/mots_io.hpp"

namespace vegtrack::synth {

struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Star-shaped silhouette r(phi) = r0 * (1 + sum a_m cos(m phi + phase_m))
// for m = 2..5, stretched by `eccentricity` along `orientation`.
struct PlantSpec {
  double world_x = 0;
  double world_y = 0;
  double base_radius = 24;
  std::array<double, 4> harmonics{};  // a_2 .. a_5
  std::array<double, 4> phases{};     // phase_2 .. phase_5
  double eccentricity = 1.0;          // >= 1
  double orientation = 0.0;           // radians
};

struct MotionSegment {
  int direction = 1;  // +1 forward (camera world-y grows), -1 backward
  int frames = 0;
  double speed = 0;  // px/frame
};

// Per-frame, per-plant shape perturbations; all standard deviations.
struct ShapeNoise {
  double amp_std = 0;     // relative harmonic amplitude jitter
  double phase_std = 0;   // radians
  double center_std = 0;  // px
  double ecc_std = 0;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  int image_height = 256;
  int image_width = 192;
  double camera_start = 0;
  std::vector<PlantSpec> plants;  // ground-truth id = index
  std::vector<MotionSegment> motion;
  ShapeNoise noise;
};

struct SynthOutput {
  FrameSeries annotations;
  int plant_count = 0;
};

// Renders the traversal. Ground-truth object ids are stable across
// disappearance and re-entry; every emitted mask is a single connected
// component; plants clipped by the window edge are still emitted (border
// filtering is the tracker's job).
SynthOutput generate(const SynthConfig& cfg);

// Noise-free silhouette of one plant on its own canvas (auto-sized,
// centered). Used by tests and for previewing shape specs.
MaskRaster rasterize_silhouette(const PlantSpec& spec);

// Shape template: a PlantSpec without a position.
struct ShapeTemplate {
  std::array<double, 4> harmonics{};
  std::array<double, 4> phases{};
  double eccentricity = 1.0;
  double orientation = 0.0;
};

// 24 pairwise well-separated templates (distinct harmonic signatures,
// eccentricities and orientations).
std::vector<ShapeTemplate> standard_shape_table();

// Contains deliberately confusable groups: pairs identical except for
// orientation (contour features collide, blob separates) and pairs
// identical except for harmonics (blob collides, contour separates).
std::vector<ShapeTemplate> ablation_shape_table();

// Groups separable only through progressively higher harmonics: pairs
// differing only in a_4 and pairs differing only in a_5.
std::vector<ShapeTemplate> fd_length_shape_table();

struct LayoutParams {
  int plant_count = 12;
  int columns = 2;
  double margin_x = 48;    // column inset from the image sides
  double row_spacing = 110;
  double jitter = 6;       // positional jitter, px
  double first_y = 60;
  double base_radius = 24;
  double radius_jitter = 3;
};

// Places plants on a row grid along the traversal direction, assigning
// templates round-robin. Plants are ordered by world y so ground-truth ids
// follow the traversal.
void place_plants(SynthConfig& cfg, const LayoutParams& layout,
                  std::span<const ShapeTemplate> shapes);

// JSON config: either an explicit "plants" array or a "layout" block with a
// named shape table ("standard", "ablation", "fd", "circles").
SynthConfig config_from_json_text(const std::string& text);
SynthConfig config_from_json_file(const std::string& path);

}  // namespace vegtrack::synth
