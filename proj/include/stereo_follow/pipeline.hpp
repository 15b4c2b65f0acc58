#pragma once

// One frame of the follow loop: identify -> fuse -> track -> control.
// The simulator and log replay both drive this class, so a replayed
// simulation reproduces its estimates exactly.

#include <optional>
#include <span>
#include <utility>

#include "stereo_follow/appearance.hpp"
#include "stereo_follow/control.hpp"
#include "stereo_follow/detection.hpp"
#include "stereo_follow/trace.hpp"
#include "stereo_follow/tracker.hpp"

namespace stereo_follow {

class FramePipeline {
 public:
  FramePipeline(StereoRig rig, std::optional<Template> tmpl, TrackerConfig tracker,
                ControllerConfig controller)
      : rig_(rig), template_(std::move(tmpl)), tracker_cfg_(tracker), controller_cfg_(controller) {
    tracker_cfg_.validate();
    controller_cfg_.validate();
  }

  /// Processes one synchronized frame and returns its trace record (without
  /// simulation-only fields) together with the command to actuate.
  TraceRecord process(std::int64_t frame, double t_s, double dt,
                      std::span<const PersonDetection> left,
                      std::span<const PersonDetection> right) {
    const Template* tmpl = template_ ? &*template_ : nullptr;
    const auto pick_left = identify(left, tmpl, tracker_cfg_);
    const auto pick_right = identify(right, tmpl, tracker_cfg_);
    const auto fused = try_fuse(pick_left, pick_right, rig_, tracker_cfg_, t_s);
    track_ = step(track_, fused, dt, tracker_cfg_);
    auto upd = update(control_, track_, dt, controller_cfg_);
    control_ = upd.state;
    command_ = upd.command;

    TraceRecord r;
    r.frame = frame;
    r.t_s = t_s;
    r.track_mode = track_.mode;
    r.v_cmd = command_.v;
    r.w_cmd = command_.w;
    r.engaged = command_.engaged;
    if (pick_left) r.similarity_left = pick_left->similarity;
    if (pick_right) r.similarity_right = pick_right->similarity;
    if (track_.mode == TrackMode::kTracking && track_.last_measurement) {
      r.estimated_z_m = track_.last_measurement->z_m;
      r.bearing_rad = track_.last_measurement->bearing_rad;
      const auto& l = left[pick_left->index];
      const auto& rr = right[pick_right->index];
      if (l.person_id && rr.person_id)
        r.tracked_id = *l.person_id == *rr.person_id ? *l.person_id : -1;
    }
    return r;
  }

  const TrackState& track() const noexcept { return track_; }
  const ControllerState& controller() const noexcept { return control_; }
  const ControlCommand& command() const noexcept { return command_; }
  const StereoRig& rig() const noexcept { return rig_; }
  const std::optional<Template>& tmpl() const noexcept { return template_; }
  const TrackerConfig& tracker_config() const noexcept { return tracker_cfg_; }

 private:
  StereoRig rig_;
  std::optional<Template> template_;
  TrackerConfig tracker_cfg_;
  ControllerConfig controller_cfg_;
  TrackState track_;
  ControllerState control_;
  ControlCommand command_;
};

}  // namespace stereo_follow
