#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "vegtrack/rle.hpp"
#include "vegtrack/synth.hpp"
#include "vegtrack/tracker.hpp"

using namespace vegtrack;

namespace {

MaskRaster disc(int h, int w, double cy, double cx, double r) {
  MaskRaster m(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if ((y + 0.5 - cy) * (y + 0.5 - cy) + (x + 0.5 - cx) * (x + 0.5 - cx) <= r * r)
        m.set(y, x, true);
  return m;
}

std::string series_text(const FrameSeries& s) {
  std::ostringstream out;
  save_sequence(out, s);
  return out.str();
}

// A small forward-backward traversal used by several cases.
synth::SynthConfig small_fb_config(std::uint64_t seed) {
  synth::SynthConfig cfg;
  cfg.seed = seed;
  cfg.image_height = 256;
  cfg.image_width = 192;
  synth::LayoutParams layout;
  layout.plant_count = 10;
  layout.columns = 2;
  layout.row_spacing = 100;
  layout.first_y = 70;
  layout.base_radius = 22;
  layout.radius_jitter = 2;
  layout.jitter = 4;
  auto shapes = synth::standard_shape_table();
  synth::place_plants(cfg, layout, shapes);
  cfg.motion.push_back({1, 80, 8});
  cfg.motion.push_back({-1, 80, 8});
  return cfg;
}

// Ground-truth id -> set of tracker ids its instances received, matched by
// mask identity (detections are the ground-truth masks).
std::map<std::int64_t, std::set<std::int64_t>> id_mapping(
    const FrameSeries& gt, const std::vector<TrackedFrame>& tracked) {
  std::map<std::int64_t, std::set<std::int64_t>> mapping;
  std::map<std::int64_t, const Frame*> gt_by_frame;
  for (const auto& f : gt.frames) gt_by_frame[f.frame_id] = &f;
  for (const auto& tf : tracked) {
    const Frame* gf = gt_by_frame.at(tf.frame_id);
    for (const auto& inst : tf.instances) {
      for (const auto& a : gf->annotations) {
        if (a.decode() == inst.mask) {
          mapping[a.object_id].insert(inst.object_id);
          break;
        }
      }
    }
  }
  return mapping;
}

}  // namespace

TEST_SUITE("tracker") {
  TEST_CASE("border filter removes incomplete plants") {
    FrameDetections dets;
    dets.frame_id = 0;
    dets.masks.push_back(disc(100, 60, 2, 30, 4));   // touches top rows
    dets.masks.push_back(disc(100, 60, 50, 30, 6));  // interior
    dets.masks.push_back(disc(100, 60, 98, 30, 4));  // touches bottom rows
    FrameDetections kept = filter_border_instances(std::move(dets), 100, 2);
    CHECK(kept.masks.size() == 1);

    FrameDetections dets2;
    dets2.frame_id = 0;
    dets2.masks.push_back(disc(100, 60, 2, 30, 4));
    FrameDetections all = filter_border_instances(std::move(dets2), 100, 0);
    CHECK(all.masks.size() == 1);
  }

  TEST_CASE("first frame ids follow top-to-bottom, left-to-right order") {
    Tracker tracker;
    FrameDetections dets;
    dets.frame_id = 0;
    dets.masks.push_back(disc(128, 128, 90, 40, 8));  // lowest
    dets.masks.push_back(disc(128, 128, 30, 90, 8));  // top right
    dets.masks.push_back(disc(128, 128, 30, 20, 8));  // top left
    TrackedFrame out = tracker.step(std::move(dets));
    REQUIRE(out.instances.size() == 3);
    CHECK(out.instances[0].object_id == 0);
    CHECK(out.instances[0].box.center_x() < 40);
    CHECK(out.instances[1].object_id == 1);
    CHECK(out.instances[1].box.center_x() > 60);
    CHECK(out.instances[2].object_id == 2);
    CHECK(out.instances[2].box.center_y() > 60);
  }

  TEST_CASE("identical consecutive frames keep their ids") {
    synth::SynthConfig cfg = small_fb_config(7);
    cfg.motion = {{1, 1, 0}};
    synth::SynthOutput one = synth::generate(cfg);
    REQUIRE(!one.annotations.frames.empty());
    const Frame& frame = one.annotations.frames[0];
    Tracker tracker;
    std::int64_t after_first = -1;
    for (int t = 0; t < 2; ++t) {
      FrameDetections dets;
      dets.frame_id = t;
      for (const auto& a : frame.annotations) dets.masks.push_back(a.decode());
      TrackedFrame out = tracker.step(std::move(dets));
      std::set<std::int64_t> ids;
      for (const auto& inst : out.instances) ids.insert(inst.object_id);
      CHECK(ids.size() == out.instances.size());
      for (std::int64_t id : ids) CHECK(id < static_cast<std::int64_t>(out.instances.size()));
      if (t == 0) {
        after_first = tracker.store().next_id();
        CHECK(after_first >= 1);
      }
    }
    // the second, identical frame creates no new tracks
    CHECK(tracker.store().next_id() == after_first);
  }

  TEST_CASE("frames must advance") {
    Tracker tracker;
    FrameDetections d0;
    d0.frame_id = 3;
    tracker.step(std::move(d0));
    FrameDetections d1;
    d1.frame_id = 3;
    CHECK_THROWS_AS(tracker.step(std::move(d1)), NonMonotonicFrameId);
  }

  TEST_CASE("empty series and single frames") {
    FrameSeries empty;
    CHECK(run_tracker(empty, {}).empty());

    synth::SynthConfig cfg = small_fb_config(3);
    cfg.motion = {{1, 1, 0}};
    FrameSeries one = synth::generate(cfg).annotations;
    auto tracked = run_tracker(one, {});
    REQUIRE(tracked.size() == 1);
    std::set<std::int64_t> ids;
    for (const auto& inst : tracked[0].instances) ids.insert(inst.object_id);
    CHECK(ids.size() == tracked[0].instances.size());
    if (!ids.empty()) {
      CHECK(*ids.begin() == 0);
      CHECK(*ids.rbegin() == static_cast<std::int64_t>(ids.size()) - 1);
    }
  }

  TEST_CASE("re-identification across a long absence") {
    synth::SynthConfig cfg = small_fb_config(11);
    synth::SynthOutput out = synth::generate(cfg);
    auto tracked = run_tracker(out.annotations, {});

    // find ground-truth plants with a sighting gap
    std::map<std::int64_t, std::vector<std::int64_t>> sightings;
    for (const auto& f : out.annotations.frames)
      for (const auto& a : f.annotations) sightings[a.object_id].push_back(f.frame_id);
    int gap_plants = 0;
    for (const auto& [id, frames] : sightings)
      for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i] - frames[i - 1] > 10) {
          ++gap_plants;
          break;
        }
    REQUIRE(gap_plants >= 1);

    auto mapping = id_mapping(out.annotations, tracked);
    for (const auto& [gt_id, pred_ids] : mapping) CHECK(pred_ids.size() == 1);

    // pred ids are never shared between plants
    std::set<std::int64_t> used;
    for (const auto& [gt_id, pred_ids] : mapping)
      for (std::int64_t id : pred_ids) CHECK(used.insert(id).second);
  }

  TEST_CASE("runs are deterministic") {
    synth::SynthConfig cfg = small_fb_config(23);
    FrameSeries gt = synth::generate(cfg).annotations;
    auto a = tracked_to_series(run_tracker(gt, {}));
    auto b = tracked_to_series(run_tracker(gt, {}));
    CHECK(series_text(a) == series_text(b));
  }

  TEST_CASE("window slack 0 disables re-identification") {
    synth::SynthConfig cfg = small_fb_config(41);
    FrameSeries gt = synth::generate(cfg).annotations;
    TrackerConfig degraded;
    degraded.window_slack = 0;
    Tracker tracker(degraded);
    for (const auto& frame : gt.frames) {
      FrameDetections dets;
      dets.frame_id = frame.frame_id;
      for (const auto& a : frame.annotations) dets.masks.push_back(a.decode());
      tracker.step(std::move(dets));
    }
    // re-entries cannot reach their old ids, so more tracks than plants
    CHECK(tracker.store().next_id() > static_cast<std::int64_t>(cfg.plants.size()));

    Tracker normal{TrackerConfig{}};
    for (const auto& frame : gt.frames) {
      FrameDetections dets;
      dets.frame_id = frame.frame_id;
      for (const auto& a : frame.annotations) dets.masks.push_back(a.decode());
      normal.step(std::move(dets));
    }
    CHECK(normal.store().next_id() < tracker.store().next_id());
  }

  TEST_CASE("empty masks are dropped, not tracked") {
    Tracker tracker;
    FrameDetections dets;
    dets.frame_id = 0;
    dets.masks.push_back(MaskRaster(64, 64));  // no foreground
    dets.masks.push_back(disc(64, 64, 30, 30, 6));
    TrackedFrame out = tracker.step(std::move(dets));
    CHECK(out.instances.size() == 1);
  }

  TEST_CASE("new ids increase monotonically over a run") {
    synth::SynthConfig cfg = small_fb_config(31);
    FrameSeries gt = synth::generate(cfg).annotations;
    Tracker tracker;
    std::int64_t last_new = -1;
    for (const auto& frame : gt.frames) {
      FrameDetections dets;
      dets.frame_id = frame.frame_id;
      for (const auto& a : frame.annotations) dets.masks.push_back(a.decode());
      std::int64_t before = tracker.store().next_id();
      tracker.step(std::move(dets));
      for (std::int64_t id = before; id < tracker.store().next_id(); ++id) {
        CHECK(id > last_new);
        last_new = id;
      }
    }
  }
}

TEST_SUITE("synth") {
  TEST_CASE("generation is deterministic") {
    synth::SynthConfig cfg = small_fb_config(5);
    cfg.noise.amp_std = 0.04;
    cfg.noise.center_std = 0.3;
    auto a = synth::generate(cfg);
    auto b = synth::generate(cfg);
    CHECK(series_text(a.annotations) == series_text(b.annotations));
  }

  TEST_CASE("forward-backward motion produces long sighting gaps") {
    synth::SynthConfig cfg = small_fb_config(9);
    auto out = synth::generate(cfg);
    std::map<std::int64_t, std::vector<std::int64_t>> sightings;
    for (const auto& f : out.annotations.frames)
      for (const auto& a : f.annotations) sightings[a.object_id].push_back(f.frame_id);
    int gap_plants = 0;
    for (const auto& [id, frames] : sightings)
      for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i] - frames[i - 1] > 10) {
          ++gap_plants;
          break;
        }
    CHECK(gap_plants >= 1);
  }

  TEST_CASE("emitted masks decode to a single connected component") {
    synth::SynthConfig cfg = small_fb_config(13);
    auto out = synth::generate(cfg);
    int checked = 0;
    for (const auto& f : out.annotations.frames) {
      if (f.frame_id % 7 != 0) continue;
      for (const auto& a : f.annotations) {
        MaskRaster m = a.decode();
        CHECK(largest_component(m) == m);
        ++checked;
      }
    }
    CHECK(checked > 0);
  }

  TEST_CASE("circle plants trip the descriptor degeneracy") {
    synth::SynthConfig cfg;
    cfg.seed = 17;
    cfg.image_height = 128;
    cfg.image_width = 128;
    synth::PlantSpec p;
    p.world_x = 64;
    p.world_y = 64;
    p.base_radius = 20;
    p.eccentricity = 1.0;  // zero harmonics: a perfect disc
    cfg.plants.push_back(p);
    cfg.motion.push_back({1, 1, 0});
    auto out = synth::generate(cfg);
    REQUIRE(out.annotations.frames.size() == 1);
    REQUIRE(out.annotations.frames[0].annotations.size() == 1);
    MaskRaster m = out.annotations.frames[0].annotations[0].decode();
    CHECK_THROWS_AS(extract_shape_feature(m, 5), DegenerateSignature);

    // the tracker still follows it through the position-only fallback
    Tracker tracker;
    for (int t = 0; t < 3; ++t) {
      FrameDetections dets;
      dets.frame_id = t;
      dets.masks.push_back(m);
      TrackedFrame tf = tracker.step(std::move(dets));
      REQUIRE(tf.instances.size() == 1);
      CHECK(tf.instances[0].object_id == 0);
    }
  }

  TEST_CASE("invalid configs are rejected") {
    synth::SynthConfig cfg;
    CHECK_THROWS_AS(synth::generate(cfg), synth::InvalidConfig);  // no plants

    cfg = small_fb_config(1);
    cfg.motion.clear();
    CHECK_THROWS_AS(synth::generate(cfg), synth::InvalidConfig);

    cfg = small_fb_config(1);
    cfg.plants[0].eccentricity = 0.5;
    CHECK_THROWS_AS(synth::generate(cfg), synth::InvalidConfig);

    cfg = small_fb_config(1);
    cfg.plants[0].harmonics = {0.2, 0.2, 0.2, 0.2};
    CHECK_THROWS_AS(synth::generate(cfg), synth::InvalidConfig);
  }

  TEST_CASE("json config round-trip") {
    const std::string text = R"({
      "seed": 42,
      "image": {"height": 200, "width": 160},
      "motion": [
        {"direction": "forward", "frames": 30, "speed": 6},
        {"direction": "backward", "frames": 30, "speed": 6}
      ],
      "noise": {"amp_std": 0.02},
      "layout": {"count": 8, "columns": 2, "row_spacing": 90, "shape_table": "standard"}
    })";
    synth::SynthConfig cfg = synth::config_from_json_text(text);
    CHECK(cfg.seed == 42);
    CHECK(cfg.image_height == 200);
    CHECK(cfg.plants.size() == 8);
    CHECK(cfg.motion.size() == 2);
    CHECK(cfg.motion[1].direction == -1);
    CHECK(cfg.noise.amp_std == doctest::Approx(0.02));
    auto out = synth::generate(cfg);
    CHECK(!out.annotations.frames.empty());

    CHECK_THROWS_AS(synth::config_from_json_text("{"), synth::InvalidConfig);
    CHECK_THROWS_AS(synth::config_from_json_text("{}"), synth::InvalidConfig);
  }
}
