#pragma once

// Scenario files (YAML). Every key is optional and falls back to the
// defaults below; the rig defaults match a 640x480, 54 degree, 94 mm
// webcam pair.
//
//   name: crossing
//   seed: 1
//   dt: 0.1
//   duration_s: 40
//   rig: {baseline_m: 0.094, width: 640, height: 480, hfov_deg: 54, mount_height_m: 1.0}
//   robot: {x: 0, y: 0, theta_deg: 90}
//   target_id: 0
//   persons:
//     - id: 0
//       clothing: {hue_deg: 0, hue_std_deg: 8, saturation: 0.8, value: 0.8}
//       path: [[0, 0, 1.5], [60, 0, 43.5]]        # [t_s, x, y]
//   lighting:
//     triangle: {low: 0.6, high: 1.0, period_s: 8} # or schedule: [[t_s, scale], ...]
//     hue_jitter_std_deg: 0
//   noise: {keypoint_noise_std_px: 0.5, quantize_pixels: false, detection_dropout_prob: 0,
//           dark_dropout_below: 0, dark_dropout_floor: 0, dark_dropout_max: 0}
//   tracker: {threshold: 0.6, epipolar_tol_px: 20, t_lost_s: 2.0, min_saturation: 0.1}
//   controller: {z_setpoint_m: 2.0, z_engage_m: 2.0, z_stop_m: 1.5, v_max: 0.7, w_max: 1.0,
//                decel_time_s: 0.5, integral_limit: 1.0,
//                distance: {kp: 1.0, ki: 0.05, kd: 0.1}, heading: {kp: 1.5, ki: 0, kd: 0.2}}
//
// Overrides use dotted paths into this tree ("controller.distance.kp=1.2",
// "persons.1.clothing.hue_deg=30").

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "stereo_follow/control.hpp"
#include "stereo_follow/errors.hpp"
#include "stereo_follow/sim.hpp"
#include "stereo_follow/stereo_geometry.hpp"
#include "stereo_follow/tracker.hpp"

namespace stereo_follow {

struct RigConfig {
  double baseline_m = 0.094;
  int width = 640;
  int height = 480;
  double hfov_deg = 54.0;
  double mount_height_m = 1.0;

  StereoRig make() const { return StereoRig::from_fov(baseline_m, {width, height}, hfov_deg); }
};

struct Scenario {
  std::string name = "unnamed";
  std::uint64_t seed = 1;
  double dt = 0.1;
  double duration_s = 30.0;
  RigConfig rig;
  sim::RobotState robot_start;
  int target_id = 0;
  std::vector<sim::PersonModel> persons;
  sim::LightingSchedule lighting;
  sim::NoiseModel noise;
  TrackerConfig tracker;
  ControllerConfig controller;

  std::size_t frame_count() const {
    return static_cast<std::size_t>(std::floor(duration_s / dt + 1e-9));
  }
  const sim::PersonModel* target() const {
    for (const auto& p : persons)
      if (p.id == target_id) return &p;
    return nullptr;
  }
};

using Override = std::pair<std::string, std::string>;

/// Parses "a.b.c=value".
inline Override parse_override(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ParameterError("override must be key=value: " + s);
  return {s.substr(0, eq), s.substr(eq + 1)};
}

namespace detail {

inline bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

inline void apply_override(YAML::Node& root, const Override& ov) {
  std::vector<std::string> keys;
  std::size_t start = 0;
  while (true) {
    const auto dot = ov.first.find('.', start);
    keys.push_back(ov.first.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  // yaml-cpp nodes are handles; reassigning a handle would overwrite the
  // target, so walk with a fresh handle per level.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    YAML::Node cur = chain.back();
    YAML::Node next;
    if (cur.IsSequence() && is_index(keys[i])) {
      const auto idx = std::stoul(keys[i]);
      if (idx >= cur.size()) throw ParameterError("override index out of range: " + ov.first);
      next = cur[idx];
    } else {
      if (!cur[keys[i]]) cur[keys[i]] = YAML::Node(YAML::NodeType::Map);
      next = cur[keys[i]];
    }
    chain.push_back(next);
  }
  YAML::Node parent = chain.back();
  YAML::Node value = YAML::Load(ov.second);
  if (parent.IsSequence() && is_index(keys.back())) {
    const auto idx = std::stoul(keys.back());
    if (idx >= parent.size()) throw ParameterError("override index out of range: " + ov.first);
    parent[idx] = value;
  } else {
    parent[keys.back()] = value;
  }
}

/// Reads fields and collects every problem instead of stopping at the first.
class Reader {
 public:
  template <class T>
  void get(const YAML::Node& n, const std::string& key, const std::string& path, T& out) {
    if (!n || !n.IsMap()) return;
    const auto v = n[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      errors.push_back(path + key + ": wrong type");
    }
  }

  void check(bool ok, std::string msg) {
    if (!ok) errors.push_back(std::move(msg));
  }

  std::vector<std::string> errors;
};

inline void read_gains(Reader& r, const YAML::Node& n, const std::string& path, PidGains& g) {
  r.get(n, "kp", path, g.kp);
  r.get(n, "ki", path, g.ki);
  r.get(n, "kd", path, g.kd);
  r.check(g.kp >= 0 && g.ki >= 0 && g.kd >= 0, path + "{kp,ki,kd}: gains must be >= 0");
}

inline std::vector<std::vector<double>> read_rows(Reader& r, const YAML::Node& n,
                                                  const std::string& path, std::size_t width) {
  std::vector<std::vector<double>> rows;
  if (!n) return rows;
  if (!n.IsSequence()) {
    r.errors.push_back(path + ": must be a list");
    return rows;
  }
  for (std::size_t i = 0; i < n.size(); ++i) {
    try {
      auto row = n[i].as<std::vector<double>>();
      if (row.size() != width) {
        r.errors.push_back(path + "." + std::to_string(i) + ": expected " + std::to_string(width) +
                           " numbers");
        continue;
      }
      rows.push_back(std::move(row));
    } catch (const YAML::Exception&) {
      r.errors.push_back(path + "." + std::to_string(i) + ": expected a list of numbers");
    }
  }
  return rows;
}

}  // namespace detail

inline Scenario scenario_from_yaml(const YAML::Node& root) {
  using detail::Reader;
  Reader r;
  Scenario s;
  if (root && !root.IsNull() && !root.IsMap()) throw ValidationError({"<root>: must be a mapping"});

  r.get(root, "name", "", s.name);
  r.get(root, "seed", "", s.seed);
  r.get(root, "dt", "", s.dt);
  r.get(root, "duration_s", "", s.duration_s);
  r.get(root, "target_id", "", s.target_id);
  r.check(s.dt > 0, "dt: must be > 0");
  r.check(s.duration_s > 0, "duration_s: must be > 0");

  const auto rig = root["rig"];
  r.get(rig, "baseline_m", "rig.", s.rig.baseline_m);
  r.get(rig, "width", "rig.", s.rig.width);
  r.get(rig, "height", "rig.", s.rig.height);
  r.get(rig, "hfov_deg", "rig.", s.rig.hfov_deg);
  r.get(rig, "mount_height_m", "rig.", s.rig.mount_height_m);
  r.check(s.rig.baseline_m > 0, "rig.baseline_m: must be > 0");
  r.check(s.rig.width > 0 && s.rig.height > 0, "rig.width/height: must be > 0");
  r.check(s.rig.hfov_deg > 0 && s.rig.hfov_deg < 180, "rig.hfov_deg: must lie in (0, 180)");

  const auto robot = root["robot"];
  double theta_deg = 90.0;
  r.get(robot, "x", "robot.", s.robot_start.x);
  r.get(robot, "y", "robot.", s.robot_start.y);
  r.get(robot, "theta_deg", "robot.", theta_deg);
  s.robot_start.theta = theta_deg * std::numbers::pi / 180.0;

  const auto persons = root["persons"];
  if (persons && !persons.IsSequence()) r.errors.push_back("persons: must be a list");
  if (persons && persons.IsSequence()) {
    for (std::size_t i = 0; i < persons.size(); ++i) {
      const auto pn = persons[i];
      const std::string path = "persons." + std::to_string(i) + ".";
      sim::PersonModel p;
      p.id = static_cast<int>(i);
      r.get(pn, "id", path, p.id);
      const auto c = pn["clothing"];
      r.get(c, "hue_deg", path + "clothing.", p.clothing.hue_deg);
      r.get(c, "hue_std_deg", path + "clothing.", p.clothing.hue_std_deg);
      r.get(c, "saturation", path + "clothing.", p.clothing.saturation);
      r.get(c, "value", path + "clothing.", p.clothing.value);
      r.check(p.clothing.hue_std_deg >= 0, path + "clothing.hue_std_deg: must be >= 0");
      r.check(p.clothing.saturation >= 0 && p.clothing.saturation <= 1,
              path + "clothing.saturation: must lie in [0, 1]");
      r.check(p.clothing.value >= 0 && p.clothing.value <= 1,
              path + "clothing.value: must lie in [0, 1]");
      const auto b = pn["body"];
      r.get(b, "shoulder_height_m", path + "body.", p.body.shoulder_height_m);
      r.get(b, "hip_height_m", path + "body.", p.body.hip_height_m);
      r.get(b, "shoulder_halfwidth_m", path + "body.", p.body.shoulder_halfwidth_m);
      r.get(b, "hip_halfwidth_m", path + "body.", p.body.hip_halfwidth_m);
      r.get(b, "radius_m", path + "body.", p.body.radius_m);
      r.get(b, "height_m", path + "body.", p.body.height_m);
      r.check(p.body.radius_m > 0, path + "body.radius_m: must be > 0");
      for (const auto& row : detail::read_rows(r, pn["path"], path + "path", 3))
        p.path.push_back({row[0], {row[1], row[2]}});
      r.check(!p.path.empty(), path + "path: needs at least one waypoint");
      for (std::size_t k = 1; k < p.path.size(); ++k)
        r.check(p.path[k].t_s > p.path[k - 1].t_s,
                path + "path." + std::to_string(k) + ": waypoint times must strictly increase");
      s.persons.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < s.persons.size(); ++i)
      for (std::size_t j = i + 1; j < s.persons.size(); ++j)
        r.check(s.persons[i].id != s.persons[j].id,
                "persons." + std::to_string(j) + ".id: duplicate id");
    r.check(s.persons.empty() || s.target() != nullptr,
            "target_id: no person has id " + std::to_string(s.target_id));
  }

  const auto light = root["lighting"];
  if (light) {
    r.get(light, "hue_jitter_std_deg", "lighting.", s.lighting.hue_jitter_std_deg);
    r.check(s.lighting.hue_jitter_std_deg >= 0, "lighting.hue_jitter_std_deg: must be >= 0");
    if (light["triangle"]) {
      double lo = 1.0;
      double hi = 1.0;
      double period = 10.0;
      r.get(light["triangle"], "low", "lighting.triangle.", lo);
      r.get(light["triangle"], "high", "lighting.triangle.", hi);
      r.get(light["triangle"], "period_s", "lighting.triangle.", period);
      r.check(period > 0, "lighting.triangle.period_s: must be > 0");
      r.check(lo > 0 && lo <= 1 && hi > 0 && hi <= 1,
              "lighting.triangle: scales must lie in (0, 1]");
      if (period > 0) {
        const double jitter = s.lighting.hue_jitter_std_deg;
        s.lighting = sim::LightingSchedule::triangle(lo, hi, period, s.duration_s);
        s.lighting.hue_jitter_std_deg = jitter;
      }
    }
    for (const auto& row : detail::read_rows(r, light["schedule"], "lighting.schedule", 2))
      s.lighting.knots.push_back({row[0], row[1]});
    for (std::size_t k = 0; k < s.lighting.knots.size(); ++k) {
      const auto& kn = s.lighting.knots[k];
      r.check(kn.scale > 0 && kn.scale <= 1,
              "lighting.schedule." + std::to_string(k) + ": scale must lie in (0, 1]");
      if (k > 0)
        r.check(kn.t_s > s.lighting.knots[k - 1].t_s,
                "lighting.schedule." + std::to_string(k) + ": times must strictly increase");
    }
  }

  const auto noise = root["noise"];
  r.get(noise, "keypoint_noise_std_px", "noise.", s.noise.keypoint_noise_std_px);
  r.get(noise, "quantize_pixels", "noise.", s.noise.quantize_pixels);
  r.get(noise, "detection_dropout_prob", "noise.", s.noise.detection_dropout_prob);
  r.get(noise, "dark_dropout_below", "noise.", s.noise.dark_dropout_below);
  r.get(noise, "dark_dropout_floor", "noise.", s.noise.dark_dropout_floor);
  r.get(noise, "dark_dropout_max", "noise.", s.noise.dark_dropout_max);
  r.check(s.noise.keypoint_noise_std_px >= 0, "noise.keypoint_noise_std_px: must be >= 0");
  r.check(s.noise.detection_dropout_prob >= 0 && s.noise.detection_dropout_prob < 1,
          "noise.detection_dropout_prob: must lie in [0, 1)");
  r.check(s.noise.dark_dropout_max >= 0 && s.noise.dark_dropout_max <= 1,
          "noise.dark_dropout_max: must lie in [0, 1]");

  const auto tr = root["tracker"];
  r.get(tr, "threshold", "tracker.", s.tracker.threshold);
  r.get(tr, "epipolar_tol_px", "tracker.", s.tracker.epipolar_tol_px);
  r.get(tr, "t_lost_s", "tracker.", s.tracker.t_lost_s);
  r.get(tr, "min_saturation", "tracker.", s.tracker.min_saturation);
  r.check(s.tracker.threshold > 0 && s.tracker.threshold < 1, "tracker.threshold: must lie in (0, 1)");
  r.check(s.tracker.epipolar_tol_px >= 0, "tracker.epipolar_tol_px: must be >= 0");
  r.check(s.tracker.t_lost_s > 0, "tracker.t_lost_s: must be > 0");
  r.check(s.tracker.min_saturation >= 0 && s.tracker.min_saturation <= 1,
          "tracker.min_saturation: must lie in [0, 1]");

  const auto ct = root["controller"];
  auto& c = s.controller;
  r.get(ct, "z_setpoint_m", "controller.", c.z_setpoint_m);
  r.get(ct, "z_engage_m", "controller.", c.z_engage_m);
  r.get(ct, "z_stop_m", "controller.", c.z_stop_m);
  r.get(ct, "v_max", "controller.", c.v_max);
  r.get(ct, "w_max", "controller.", c.w_max);
  r.get(ct, "decel_time_s", "controller.", c.decel_time_s);
  r.get(ct, "integral_limit", "controller.", c.integral_limit);
  if (ct) {
    detail::read_gains(r, ct["distance"], "controller.distance.", c.distance);
    detail::read_gains(r, ct["heading"], "controller.heading.", c.heading);
  }
  r.check(c.z_stop_m > 0 && c.z_stop_m <= c.z_setpoint_m && c.z_setpoint_m <= c.z_engage_m,
          "controller.z_*: need 0 < z_stop_m <= z_setpoint_m <= z_engage_m");
  r.check(c.v_max > 0, "controller.v_max: must be > 0");
  r.check(c.w_max > 0, "controller.w_max: must be > 0");
  r.check(c.decel_time_s > 0, "controller.decel_time_s: must be > 0");
  r.check(c.integral_limit > 0, "controller.integral_limit: must be > 0");

  if (!r.errors.empty()) throw ValidationError(std::move(r.errors));
  return s;
}

inline YAML::Node load_scenario_yaml(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error("file not found: " + path);
  try {
    return YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ValidationError({std::string("<file>: ") + e.what()});
  }
}

inline Scenario load_scenario(const std::string& path, const std::vector<Override>& overrides = {}) {
  YAML::Node root = load_scenario_yaml(path);
  for (const auto& ov : overrides) detail::apply_override(root, ov);
  return scenario_from_yaml(root);
}

inline Scenario scenario_from_string(const std::string& text,
                                     const std::vector<Override>& overrides = {}) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError({std::string("<text>: ") + e.what()});
  }
  for (const auto& ov : overrides) detail::apply_override(root, ov);
  return scenario_from_yaml(root);
}

}  // namespace stereo_follow
