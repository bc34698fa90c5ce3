// vegtrack command line: track / eval / synth / render.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vegtrack/config.hpp"
#include "vegtrack/evaluation.hpp"
#include "vegtrack/image_io.hpp"
#include "vegtrack/mots_io.hpp"
#include "vegtrack/rle.hpp"
#include "vegtrack/synth.hpp"
#include "vegtrack/tracker.hpp"

namespace fs = std::filesystem;
using namespace vegtrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mask-directory detections: files named <frame>_<object>.pgm.
std::map<std::int64_t, std::vector<fs::path>> scan_mask_dir(const fs::path& dir) {
  static const std::regex name_re(R"((\d+)_(\d+)\.pgm)");
  std::map<std::int64_t, std::vector<fs::path>> by_frame;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::smatch m;
    std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, name_re)) continue;
    by_frame[std::stoll(m[1])].push_back(entry.path());
  }
  for (auto& [frame, paths] : by_frame) std::sort(paths.begin(), paths.end());
  return by_frame;
}

TrackerConfig make_config(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  TrackerConfig cfg;
  if (!config_path.empty()) cfg = load_tracker_config(config_path);
  for (const auto& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got: " + kv);
    apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int cmd_track(const std::string& input, const std::string& output,
              const std::string& config_path, const std::vector<std::string>& overrides) {
  TrackerConfig cfg = make_config(config_path, overrides);
  Tracker tracker(cfg);

  double input_ms = 0;
  std::vector<TrackedFrame> tracked;

  auto process_frame = [&](FrameDetections dets) {
    tracked.push_back(tracker.step(std::move(dets)));
  };

  const fs::path in_path(input);
  if (!fs::exists(in_path)) throw InputError("input not found: " + input);
  if (fs::is_directory(in_path)) {
    auto by_frame = scan_mask_dir(in_path);
    if (by_frame.empty())
      throw InputError("no <frame>_<object>.pgm masks in " + input);
    for (const auto& [frame_id, paths] : by_frame) {
      const auto t0 = std::chrono::steady_clock::now();
      FrameDetections dets;
      dets.frame_id = frame_id;
      for (const auto& p : paths) dets.masks.push_back(read_mask_pgm(p));
      input_ms += std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
      process_frame(std::move(dets));
    }
  } else {
    FrameSeries series = load_sequence_file(input);
    for (const auto& frame : series.frames) {
      const auto t0 = std::chrono::steady_clock::now();
      FrameDetections dets;
      dets.frame_id = frame.frame_id;
      for (const auto& a : frame.annotations) {
        if (a.category != 1) continue;
        dets.masks.push_back(a.decode());
      }
      input_ms += std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
      process_frame(std::move(dets));
    }
  }

  // write to a temp file first so a failure never leaves partial output
  const fs::path out_path(output);
  const fs::path tmp_path = out_path.string() + ".tmp";
  try {
    save_sequence_file(tmp_path.string(), tracked_to_series(tracked));
    fs::rename(tmp_path, out_path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp_path, ec);
    throw;
  }

  double track_ms = 0;
  for (const auto& t : tracker.timings()) track_ms += t.total_ms;
  const std::size_t n = std::max<std::size_t>(1, tracked.size());
  std::cout.setf(std::ios::fixed);
  std::cout.precision(2);
  std::cout << "frames: " << tracked.size() << "  tracks: " << tracker.store().next_id()
            << "\n";
  std::cout << "per-frame ms  segment-input: " << input_ms / n
            << "  tracking: " << track_ms / n
            << "  total: " << (input_ms + track_ms) / n << "\n";
  std::cout << "fps           segment-input: " << (input_ms > 0 ? 1000.0 * n / input_ms : 0.0)
            << "  tracking: " << (track_ms > 0 ? 1000.0 * n / track_ms : 0.0)
            << "  total: " << (input_ms + track_ms > 0 ? 1000.0 * n / (input_ms + track_ms) : 0.0)
            << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path,
             const std::string& json_path, bool per_threshold) {
  FrameSeries gt = load_sequence_file(gt_path);
  FrameSeries pred = load_sequence_file(pred_path);
  MetricsReport report = evaluate(gt, pred);
  std::cout << format_report(report, per_threshold);
  if (!json_path.empty()) {
    nlohmann::json j;
    j["hota"] = report.hota;
    j["det_a"] = report.det_a;
    j["ass_a"] = report.ass_a;
    j["ass_re"] = report.ass_re;
    j["ass_pr"] = report.ass_pr;
    auto& rows = j["per_threshold"] = nlohmann::json::array();
    for (const auto& r : report.per_threshold) {
      rows.push_back({{"alpha", r.alpha_loc},
                      {"tp", r.tp},
                      {"fn", r.fn},
                      {"fp", r.fp},
                      {"det_a", r.det_a},
                      {"ass_a", r.ass_a},
                      {"ass_re", r.ass_re},
                      {"ass_pr", r.ass_pr},
                      {"hota", r.hota}});
    }
    std::ofstream out(json_path);
    if (!out) throw InputError("cannot write " + json_path);
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              bool render_masks) {
  synth::SynthConfig cfg = synth::config_from_json_file(config_path);
  synth::SynthOutput out = synth::generate(cfg);
  fs::create_directories(out_dir);
  save_sequence_file((fs::path(out_dir) / "annotations.txt").string(), out.annotations);
  if (render_masks) {
    char name[64];
    for (const auto& frame : out.annotations.frames) {
      for (const auto& a : frame.annotations) {
        std::snprintf(name, sizeof(name), "%06lld_%03lld.pgm",
                      static_cast<long long>(frame.frame_id),
                      static_cast<long long>(a.object_id));
        write_mask_pgm(fs::path(out_dir) / name, a.decode());
      }
    }
  }
  std::cout << "frames: " << out.annotations.frames.size()
            << "  plants: " << out.plant_count << "\n";
  return kExitOk;
}

// 5x7 digit glyphs for id labels.
constexpr std::uint8_t kDigits[10][7] = {
    {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e}, {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e},
    {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f}, {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e},
    {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02}, {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e},
    {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e}, {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e}, {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c}};

void draw_digit(ImageRgb& img, int digit, int x0, int y0,
                std::array<std::uint8_t, 3> color) {
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 5; ++c) {
      if (!(kDigits[digit][r] & (0x10 >> c))) continue;
      for (int sy = 0; sy < 2; ++sy)
        for (int sx = 0; sx < 2; ++sx) {
          int y = y0 + 2 * r + sy, x = x0 + 2 * c + sx;
          if (y >= 0 && y < img.height && x >= 0 && x < img.width) img.at(y, x) = color;
        }
    }
}

void draw_number(ImageRgb& img, std::int64_t value, int x0, int y0,
                 std::array<std::uint8_t, 3> color) {
  std::string digits = std::to_string(value);
  for (std::size_t i = 0; i < digits.size(); ++i)
    draw_digit(img, digits[i] - '0', x0 + static_cast<int>(i) * 12, y0, color);
}

std::array<std::uint8_t, 3> id_color(std::int64_t id) {
  // golden-ratio hue spacing, saturated
  double h = std::fmod(0.61803398875 * static_cast<double>(id) + 0.13, 1.0) * 6.0;
  int i = static_cast<int>(h);
  double f = h - i;
  auto to8 = [](double v) { return static_cast<std::uint8_t>(v * 255.0); };
  double p = 0.15, q = 1.0 - 0.85 * f, t = 0.15 + 0.85 * f;
  switch (i % 6) {
    case 0: return {to8(1.0), to8(t), to8(p)};
    case 1: return {to8(q), to8(1.0), to8(p)};
    case 2: return {to8(p), to8(1.0), to8(t)};
    case 3: return {to8(p), to8(q), to8(1.0)};
    case 4: return {to8(t), to8(p), to8(1.0)};
    default: return {to8(1.0), to8(p), to8(q)};
  }
}

int cmd_render(const std::string& annotations, const std::string& images_dir,
               const std::string& out_dir) {
  FrameSeries series = load_sequence_file(annotations);
  fs::create_directories(out_dir);
  char name[64];
  for (const auto& frame : series.frames) {
    if (frame.annotations.empty()) continue;
    const int h = frame.annotations[0].image_height;
    const int w = frame.annotations[0].image_width;
    ImageRgb img(h, w);
    if (!images_dir.empty()) {
      std::snprintf(name, sizeof(name), "%06lld",
                    static_cast<long long>(frame.frame_id));
      for (const char* ext : {".ppm", ".pgm"}) {
        fs::path p = fs::path(images_dir) / (std::string(name) + ext);
        if (fs::exists(p)) {
          img = read_image_p6_or_p5(p);
          break;
        }
      }
      if (img.height != h || img.width != w)
        throw InputError("underlay image size mismatch at frame " +
                         std::to_string(frame.frame_id));
    }
    for (const auto& a : frame.annotations) {
      MaskRaster mask = a.decode();
      auto color = id_color(a.object_id);
      auto bbox = mask.tight_bbox();
      if (!bbox) continue;
      Contour contour = trace_contour(mask);
      for (const auto& p : contour.points) {
        int y = static_cast<int>(p.y), x = static_cast<int>(p.x);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            int yy = y + dy, xx = x + dx;
            if (yy >= 0 && yy < h && xx >= 0 && xx < w) img.at(yy, xx) = color;
          }
      }
      draw_number(img, a.object_id, bbox->x_min + 2, std::max(0, bbox->y_min - 16),
                  color);
    }
    std::snprintf(name, sizeof(name), "%06lld.ppm",
                  static_cast<long long>(frame.frame_id));
    write_image_ppm(fs::path(out_dir) / name, img);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracking-by-segmentation toolkit for same-looking plants"};
  app.require_subcommand(1);

  auto* track = app.add_subcommand("track", "assign persistent ids to instance masks");
  std::string track_input, track_output, track_config;
  std::vector<std::string> track_overrides;
  track->add_option("--input", track_input, "annotation file or mask directory")
      ->required();
  track->add_option("--output", track_output, "output annotation file")->required();
  track->add_option("--config", track_config, "key = value config file");
  track->add_option("--set", track_overrides, "config override key=value (repeatable)");

  auto* eval = app.add_subcommand("eval", "score a tracking result against ground truth");
  std::string eval_gt, eval_pred, eval_json;
  bool eval_rows = false;
  eval->add_option("--gt", eval_gt, "ground-truth annotation file")->required();
  eval->add_option("--pred", eval_pred, "predicted annotation file")->required();
  eval->add_option("--json", eval_json, "write machine-readable report here");
  eval->add_flag("--per-threshold", eval_rows, "print the per-threshold table");

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic traversal");
  std::string synth_config, synth_out;
  bool synth_masks = false;
  synth_cmd->add_option("--config", synth_config, "JSON generator config")->required();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_flag("--render-masks", synth_masks, "also write per-instance PGM masks");

  auto* render = app.add_subcommand("render", "draw id-tinted contour overlays");
  std::string render_ann, render_images, render_out;
  render->add_option("--annotations", render_ann, "annotation file")->required();
  render->add_option("--images", render_images, "underlay images directory (PPM/PGM)");
  render->add_option("--out", render_out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (*track) return cmd_track(track_input, track_output, track_config, track_overrides);
    if (*eval) return cmd_eval(eval_gt, eval_pred, eval_json, eval_rows);
    if (*synth_cmd) return cmd_synth(synth_config, synth_out, synth_masks);
    if (*render) return cmd_render(render_ann, render_images, render_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const MalformedLine& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const MalformedRle& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DuplicateObjectInFrame& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ImageIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const FrameRangeMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const synth::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::runtime_error& e) {
    // filesystem and io failures reported as input problems
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
