#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "vegtrack/tracker.hpp"

namespace vegtrack {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "key = value" lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_key_value_stream(std::istream& in);

// Recognized keys: s, t_all, t_p, fd_length, border_margin,
// fallback_shape_cost, feature_mode (combined|contour|blob),
// kf_process_pos_std, kf_process_vel_std, kf_obs_std, kf_init_pos_std,
// kf_init_vel_std. Unknown keys raise ConfigError.
TrackerConfig tracker_config_from_map(const std::map<std::string, std::string>& kv);

TrackerConfig load_tracker_config(const std::string& path);

// Applies one key=value assignment on top of an existing config (used for
// command-line overrides).
void apply_config_override(TrackerConfig& cfg, const std::string& key,
                           const std::string& value);

}  // namespace vegtrack
