#include "vegtrack/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vegtrack {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + value);
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("config: bad integer value for '" + key + "': " + value);
  return v;
}

}  // namespace

std::map<std::string, std::string> parse_key_value_stream(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

void apply_config_override(TrackerConfig& cfg, const std::string& key,
                           const std::string& value) {
  if (key == "s") {
    cfg.window_slack = parse_int(key, value);
    if (cfg.window_slack < 0) throw ConfigError("config: s must be >= 0");
  } else if (key == "t_all") {
    cfg.t_all = parse_double(key, value);
  } else if (key == "t_p") {
    cfg.t_p = parse_double(key, value);
  } else if (key == "fd_length") {
    cfg.fd_length = static_cast<int>(parse_int(key, value));
    if (cfg.fd_length < 1) throw ConfigError("config: fd_length must be >= 1");
  } else if (key == "border_margin") {
    cfg.border_margin = static_cast<int>(parse_int(key, value));
    if (cfg.border_margin < 0) throw ConfigError("config: border_margin must be >= 0");
  } else if (key == "fallback_shape_cost") {
    cfg.fallback_shape_cost = parse_double(key, value);
  } else if (key == "feature_mode") {
    if (value == "combined")
      cfg.feature_mode = FeatureMode::kCombined;
    else if (value == "contour")
      cfg.feature_mode = FeatureMode::kContourOnly;
    else if (value == "blob")
      cfg.feature_mode = FeatureMode::kBlobOnly;
    else
      throw ConfigError("config: feature_mode must be combined|contour|blob");
  } else if (key == "kf_process_pos_std") {
    cfg.kf.process_pos_std = parse_double(key, value);
  } else if (key == "kf_process_vel_std") {
    cfg.kf.process_vel_std = parse_double(key, value);
  } else if (key == "kf_obs_std") {
    cfg.kf.obs_std = parse_double(key, value);
  } else if (key == "kf_init_pos_std") {
    cfg.kf.init_pos_std = parse_double(key, value);
  } else if (key == "kf_init_vel_std") {
    cfg.kf.init_vel_std = parse_double(key, value);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

TrackerConfig tracker_config_from_map(const std::map<std::string, std::string>& kv) {
  TrackerConfig cfg;
  for (const auto& [key, value] : kv) apply_config_override(cfg, key, value);
  return cfg;
}

TrackerConfig load_tracker_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  auto kv = parse_key_value_stream(in);
  return tracker_config_from_map(kv);
}

}  // namespace vegtrack
