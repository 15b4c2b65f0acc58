#pragma once

// Deterministic desk-scale world: walking people with coloured clothing, a
// unicycle robot carrying the stereo rig, and a synthetic pose detector
// with occlusion, pixel noise and lighting-dependent dropout.
//
// World frame is a right-handed ground plane (x, y) with heights measured
// up from the floor. Robot heading theta = 0 faces +x.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "stereo_follow/detection.hpp"
#include "stereo_follow/stereo_geometry.hpp"

namespace stereo_follow::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;  // height above the floor
};

struct BodyModel {
  double shoulder_height_m = 1.4;
  double hip_height_m = 0.9;
  double shoulder_halfwidth_m = 0.2;
  double hip_halfwidth_m = 0.15;
  double radius_m = 0.25;   // occlusion cylinder
  double height_m = 1.8;    // occlusion cylinder top
};

/// Lateral offset (person's right positive) and height of each COCO-18
/// part. Only shoulders and hips come from the body model; the rest are
/// fixed proportions.
inline std::array<std::array<double, 2>, coco::kNumParts> skeleton_layout(const BodyModel& b) {
  std::array<std::array<double, 2>, coco::kNumParts> k{};
  k[coco::kNose] = {0.0, 1.62};
  k[coco::kNeck] = {0.0, 1.45};
  k[coco::kRShoulder] = {b.shoulder_halfwidth_m, b.shoulder_height_m};
  k[coco::kRElbow] = {0.24, 1.12};
  k[coco::kRWrist] = {0.26, 0.86};
  k[coco::kLShoulder] = {-b.shoulder_halfwidth_m, b.shoulder_height_m};
  k[coco::kLElbow] = {-0.24, 1.12};
  k[coco::kLWrist] = {-0.26, 0.86};
  k[coco::kRHip] = {b.hip_halfwidth_m, b.hip_height_m};
  k[coco::kRKnee] = {0.13, 0.50};
  k[coco::kRAnkle] = {0.12, 0.08};
  k[coco::kLHip] = {-b.hip_halfwidth_m, b.hip_height_m};
  k[coco::kLKnee] = {-0.13, 0.50};
  k[coco::kLAnkle] = {-0.12, 0.08};
  k[coco::kREye] = {0.03, 1.66};
  k[coco::kLEye] = {-0.03, 1.66};
  k[coco::kREar] = {0.07, 1.63};
  k[coco::kLEar] = {-0.07, 1.63};
  return k;
}

struct Clothing {
  double hue_deg = 0.0;
  double hue_std_deg = 8.0;
  double saturation = 0.8;
  double value = 0.8;
};

struct Waypoint {
  double t_s = 0.0;
  Vec2 position;
};

struct PersonModel {
  int id = 0;
  std::vector<Waypoint> path;
  BodyModel body;
  Clothing clothing;

  /// Linear interpolation; held at the first/last waypoint outside the path.
  Vec2 position_at(double t) const {
    if (path.empty()) return {};
    if (t <= path.front().t_s) return path.front().position;
    if (t >= path.back().t_s) return path.back().position;
    auto it = std::upper_bound(path.begin(), path.end(), t,
                               [](double tt, const Waypoint& w) { return tt < w.t_s; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double s = (t - a.t_s) / (b.t_s - a.t_s);
    return {a.position.x + s * (b.position.x - a.position.x),
            a.position.y + s * (b.position.y - a.position.y)};
  }
};

struct LightingKnot {
  double t_s = 0.0;
  double scale = 1.0;
};

struct LightingSchedule {
  std::vector<LightingKnot> knots;  // empty means constant 1.0
  double hue_jitter_std_deg = 0.0;

  double scale_at(double t) const {
    if (knots.empty()) return 1.0;
    if (t <= knots.front().t_s) return knots.front().scale;
    if (t >= knots.back().t_s) return knots.back().scale;
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double tt, const LightingKnot& k) { return tt < k.t_s; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    return a.scale + (t - a.t_s) / (b.t_s - a.t_s) * (b.scale - a.scale);
  }

  /// Triangle wave between `low` and `high`, starting at `high`.
  static LightingSchedule triangle(double low, double high, double period_s, double duration_s) {
    LightingSchedule s;
    const double half = period_s / 2.0;
    for (int i = 0; i * half <= duration_s + half; ++i)
      s.knots.push_back({i * half, i % 2 == 0 ? high : low});
    return s;
  }
};

struct NoiseModel {
  double keypoint_noise_std_px = 0.0;
  bool quantize_pixels = false;
  double detection_dropout_prob = 0.0;
  // Dropout ramps from 0 at `dark_dropout_below` up to `dark_dropout_max`
  // at `dark_dropout_floor` and below. Disabled when dark_dropout_max == 0.
  double dark_dropout_below = 0.0;
  double dark_dropout_floor = 0.0;
  double dark_dropout_max = 0.0;

  double dropout_at(double lighting_scale) const {
    double p = detection_dropout_prob;
    if (dark_dropout_max > 0.0 && lighting_scale < dark_dropout_below) {
      const double span = dark_dropout_below - dark_dropout_floor;
      const double f = span > 0.0 ? (dark_dropout_below - lighting_scale) / span : 1.0;
      p = std::max(p, dark_dropout_max * std::clamp(f, 0.0, 1.0));
    }
    return p;
  }
};

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double w = 0.0;
};

/// Explicit Euler step of unicycle kinematics.
inline RobotState integrate(const RobotState& r, double dt) {
  RobotState n = r;
  n.x += r.v * std::cos(r.theta) * dt;
  n.y += r.v * std::sin(r.theta) * dt;
  n.theta += r.w * dt;
  return n;
}

struct World {
  double t_s = 0.0;
  RobotState robot;
  std::vector<PersonModel> persons;
  LightingSchedule lighting;
  double mount_height_m = 1.0;  // optical centers above the floor
};

inline World step_world(const World& w, double dt) {
  World n = w;
  n.robot = integrate(w.robot, dt);
  n.t_s = w.t_s + dt;
  return n;
}

/// Rig-frame axes of a robot pose, expressed in the world.
struct RigFrame {
  Vec2 origin;
  Vec2 forward;
  Vec2 right;
  double mount_height_m = 1.0;

  static RigFrame of(const RobotState& r, double mount_height_m) {
    return {{r.x, r.y},
            {std::cos(r.theta), std::sin(r.theta)},
            {std::sin(r.theta), -std::cos(r.theta)},
            mount_height_m};
  }

  RigPoint3 to_rig(const Vec3& p) const {
    const double dx = p.x - origin.x;
    const double dy = p.y - origin.y;
    return {dx * right.x + dy * right.y, mount_height_m - p.h, dx * forward.x + dy * forward.y};
  }

  Vec3 camera_center(Camera c, double baseline_m) const {
    const double off = (c == Camera::kLeft ? -0.5 : 0.5) * baseline_m;
    return {origin.x + off * right.x, origin.y + off * right.y, mount_height_m};
  }
};

/// World positions of the 18 keypoints. The body is modelled as a plane
/// through the person's centre facing the rig, so every keypoint of one
/// person shares the same rig depth.
inline std::array<Vec3, coco::kNumParts> keypoints_world(const PersonModel& p, double t,
                                                        const RigFrame& rig) {
  const Vec2 c = p.position_at(t);
  const auto layout = skeleton_layout(p.body);
  std::array<Vec3, coco::kNumParts> out{};
  for (std::size_t i = 0; i < coco::kNumParts; ++i) {
    const double lateral = layout[i][0];
    out[i] = {c.x + lateral * rig.right.x, c.y + lateral * rig.right.y, layout[i][1]};
  }
  return out;
}

/// Rig depth of the torso centroid: the distance the tracker estimates.
inline double true_distance(const PersonModel& p, double t, const RigFrame& rig) {
  const Vec2 c = p.position_at(t);
  return rig.to_rig({c.x, c.y, 0.0}).z;
}

/// True if the open segment a->b passes inside the vertical cylinder
/// (centre `axis`, `radius`, floor to `top`).
inline bool segment_hits_cylinder(const Vec3& a, const Vec3& b, const Vec2& axis, double radius,
                                  double top) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double fx = a.x - axis.x;
  const double fy = a.y - axis.y;
  const double qa = dx * dx + dy * dy;
  const double qb = fx * dx + fy * dy;
  const double qc = fx * fx + fy * fy - radius * radius;
  double t0;
  double t1;
  if (qa <= 0.0) {
    if (qc >= 0.0) return false;
    t0 = 0.0;
    t1 = 1.0;
  } else {
    const double disc = qb * qb - qa * qc;
    if (disc <= 0.0) return false;
    const double root = std::sqrt(disc);
    t0 = std::max((-qb - root) / qa, 0.0);
    t1 = std::min((-qb + root) / qa, 1.0);
    if (!(t0 < t1)) return false;
  }
  const double h0 = a.h + t0 * (b.h - a.h);
  const double h1 = a.h + t1 * (b.h - a.h);
  return std::max(h0, h1) >= 0.0 && std::min(h0, h1) <= top;
}

struct KeypointVisibility {
  std::array<bool, coco::kNumParts> visible{};
  std::array<double, coco::kNumParts> u{};
  std::array<double, coco::kNumParts> v{};
};

/// Noiseless geometry of one person in one camera: projection plus the
/// frustum and occlusion tests.
inline KeypointVisibility keypoint_visibility(const World& world, std::size_t person_index,
                                              const StereoRig& rig, Camera cam) {
  const auto frame = RigFrame::of(world.robot, world.mount_height_m);
  const auto& person = world.persons[person_index];
  const auto kps = keypoints_world(person, world.t_s, frame);
  const Vec3 eye = frame.camera_center(cam, rig.baseline_m());
  KeypointVisibility out;
  for (std::size_t i = 0; i < coco::kNumParts; ++i) {
    const RigPoint3 p = frame.to_rig(kps[i]);
    if (!(p.z > 0.0)) continue;
    const auto proj = project(rig, p);
    const double u = cam == Camera::kLeft ? proj.u_left : proj.u_right;
    const double v = cam == Camera::kLeft ? proj.v_left : proj.v_right;
    out.u[i] = u;
    out.v[i] = v;
    if (!rig.in_image(u, v)) continue;
    bool blocked = false;
    for (std::size_t j = 0; j < world.persons.size() && !blocked; ++j) {
      if (j == person_index) continue;
      const auto& other = world.persons[j];
      blocked = segment_hits_cylinder(eye, kps[i], other.position_at(world.t_s),
                                      other.body.radius_m, other.body.height_m);
    }
    out.visible[i] = !blocked;
  }
  return out;
}

inline constexpr std::size_t kTorsoSamples = 500;
inline constexpr double kKeypointConfidence = 0.9;

struct StereoDetections {
  std::vector<PersonDetection> left;
  std::vector<PersonDetection> right;
};

inline double wrap_hue(double h) {
  h = std::fmod(h, 360.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

/// Clothing pixels under the given lighting. Brightness touches only v.
inline std::vector<HsvPixel> sample_clothing(const Clothing& c, double lighting_scale,
                                             double hue_jitter_std_deg, std::size_t n,
                                             std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<HsvPixel> px;
  px.reserve(n);
  const double v = std::clamp(c.value * lighting_scale, 0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double h = c.hue_deg;
    if (c.hue_std_deg > 0.0) h += c.hue_std_deg * unit(rng);
    if (hue_jitter_std_deg > 0.0) h += hue_jitter_std_deg * unit(rng);
    px.push_back({wrap_hue(h), c.saturation, v, c.saturation > 0.0});
  }
  return px;
}

/// Synthetic detector output for one frame. Random draws happen in a fixed
/// order (camera, person, keypoint noise, dropout, pixels) regardless of
/// visibility, so a run is a pure function of the seed.
inline StereoDetections render_detections(const World& world, const StereoRig& rig,
                                          const NoiseModel& noise, std::int64_t frame_index,
                                          std::mt19937_64& rng) {
  StereoDetections out;
  const double scale = world.lighting.scale_at(world.t_s);
  const double p_drop = noise.dropout_at(scale);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  for (Camera cam : {Camera::kLeft, Camera::kRight}) {
    auto& list = cam == Camera::kLeft ? out.left : out.right;
    for (std::size_t pi = 0; pi < world.persons.size(); ++pi) {
      const auto& person = world.persons[pi];
      const auto vis = keypoint_visibility(world, pi, rig, cam);
      PersonDetection d;
      d.camera = cam;
      d.frame_index = frame_index;
      d.timestamp_s = world.t_s;
      d.person_id = person.id;
      bool any = false;
      for (std::size_t k = 0; k < coco::kNumParts; ++k) {
        double du = 0.0;
        double dv = 0.0;
        if (noise.keypoint_noise_std_px > 0.0) {
          du = noise.keypoint_noise_std_px * unit(rng);
          dv = noise.keypoint_noise_std_px * unit(rng);
        }
        if (!vis.visible[k]) continue;
        double u = vis.u[k] + du;
        double v = vis.v[k] + dv;
        if (noise.quantize_pixels) {
          u = std::round(u);
          v = std::round(v);
        }
        d.keypoints[k] = {u, v, kKeypointConfidence, true};
        any = true;
      }
      const bool dropped = uniform(rng) < p_drop;
      auto pixels = sample_clothing(person.clothing, scale, world.lighting.hue_jitter_std_deg,
                                    kTorsoSamples, rng);
      if (!any || dropped) continue;
      if (has_torso(d)) d.torso_pixels = std::move(pixels);
      list.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace stereo_follow::sim
