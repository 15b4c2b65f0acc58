#pragma once

// Closed-loop scenario runs and log replay.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "stereo_follow/keypoint_log.hpp"
#include "stereo_follow/pipeline.hpp"
#include "stereo_follow/scenario.hpp"
#include "stereo_follow/sim.hpp"

namespace stereo_follow {

/// Template of the target, sampled from its clothing at full brightness
/// from a generator independent of the frame loop.
inline std::optional<Template> scenario_template(const Scenario& s) {
  const auto* target = s.target();
  if (!target) return std::nullopt;
  std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto pixels = sim::sample_clothing(target->clothing, 1.0, 0.0, sim::kTorsoSamples, rng);
  try {
    return make_template(pixels, "person-" + std::to_string(target->id), s.tracker.min_saturation);
  } catch (const NoAppearanceDataError&) {
    return std::nullopt;
  }
}

struct SimulationResult {
  Trace trace;
  Metrics metrics;
  std::vector<LogFrame> left_log;
  std::vector<LogFrame> right_log;
  std::optional<Template> tmpl;
  std::vector<sim::RobotState> robot_path;  // pose at each frame, before the step
};

/// Similarity of person `id`'s own detection, whether or not it was chosen.
inline std::optional<double> person_similarity(const std::vector<PersonDetection>& dets, int id,
                                               const Template& t, double min_sat) {
  for (const auto& d : dets) {
    if (d.person_id != id || !has_torso(d)) continue;
    try {
      return similarity(detection_histogram(d, min_sat), t.histogram);
    } catch (const NoAppearanceDataError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Fixed-rate loop: render -> identify -> fuse -> track -> control -> move.
inline SimulationResult run_scenario(const Scenario& s, bool keep_logs = false) {
  const StereoRig rig = s.rig.make();
  SimulationResult res;
  res.tmpl = scenario_template(s);
  FramePipeline pipe(rig, res.tmpl, s.tracker, s.controller);

  sim::World world;
  world.robot = s.robot_start;
  world.robot.v = world.robot.w = 0.0;
  world.persons = s.persons;
  world.lighting = s.lighting;
  world.mount_height_m = s.rig.mount_height_m;
  std::mt19937_64 rng(s.seed);

  const auto* target = s.target();
  const std::size_t n = s.frame_count();
  res.trace.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    world.t_s = static_cast<double>(k) * s.dt;
    const auto frame = static_cast<std::int64_t>(k);
    auto dets = sim::render_detections(world, rig, s.noise, frame, rng);
    auto rec = pipe.process(frame, world.t_s, s.dt, dets.left, dets.right);

    if (target) {
      const auto rf = sim::RigFrame::of(world.robot, world.mount_height_m);
      rec.true_distance_m = sim::true_distance(*target, world.t_s, rf);
      if (res.tmpl) {
        const double ms = s.tracker.min_saturation;
        rec.target_similarity_left = person_similarity(dets.left, target->id, *res.tmpl, ms);
        rec.target_similarity_right = person_similarity(dets.right, target->id, *res.tmpl, ms);
      }
    }
    if (keep_logs) {
      res.left_log.push_back({frame, world.t_s, Camera::kLeft, std::move(dets.left), true});
      res.right_log.push_back({frame, world.t_s, Camera::kRight, std::move(dets.right), true});
    }
    res.robot_path.push_back(world.robot);
    res.trace.push_back(rec);

    world.robot.v = pipe.command().v;
    world.robot.w = pipe.command().w;
    world = sim::step_world(world, s.dt);
  }
  res.metrics = compute_metrics(res.trace, s.dt,
                                target ? std::optional<int>(target->id) : std::nullopt);
  return res;
}

struct ReplayOptions {
  TrackerConfig tracker;
  ControllerConfig controller;
  std::optional<int> target_id;
  double default_dt = 0.1;
};

/// Pairs frames by equal frame index and runs the same per-frame pipeline
/// as the simulator. Commands are computed but not actuated.
inline Trace replay(const std::vector<LogFrame>& left, const std::vector<LogFrame>& right,
                    const StereoRig& rig, const std::optional<Template>& tmpl,
                    const ReplayOptions& opt) {
  std::map<std::int64_t, const LogFrame*> lmap;
  std::map<std::int64_t, const LogFrame*> rmap;
  for (const auto& f : left) lmap[f.frame_index] = &f;
  for (const auto& f : right) rmap[f.frame_index] = &f;
  {
    auto li = lmap.begin();
    auto ri = rmap.begin();
    while (li != lmap.end() || ri != rmap.end()) {
      if (li == lmap.end()) throw AlignmentError(ri->first);
      if (ri == rmap.end()) throw AlignmentError(li->first);
      if (li->first != ri->first) throw AlignmentError(std::min(li->first, ri->first));
      ++li;
      ++ri;
    }
  }
  if (lmap.empty()) throw AlignmentError(0);

  FramePipeline pipe(rig, tmpl, opt.tracker, opt.controller);
  Trace trace;
  std::optional<double> prev_t;
  for (const auto& [idx, lf] : lmap) {
    const auto* rf = rmap.at(idx);
    const double t = lf->timestamp_s;
    double dt = opt.default_dt;
    if (prev_t && t > *prev_t) dt = t - *prev_t;
    prev_t = t;
    trace.push_back(pipe.process(idx, t, dt, lf->people, rf->people));
  }
  return trace;
}

}  // namespace stereo_follow
