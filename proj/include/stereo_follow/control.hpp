#pragma once

// Person-following controller: independent PID loops on distance and
// heading, engage/stop hysteresis, and a linear stop ramp while occluded.

#include <algorithm>
#include <cmath>
#include <optional>

#include "stereo_follow/errors.hpp"
#include "stereo_follow/tracker.hpp"

namespace stereo_follow {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

struct ControllerConfig {
  double z_setpoint_m = 2.0;
  double z_engage_m = 2.0;
  double z_stop_m = 1.5;
  double v_max = 0.7;
  double w_max = 1.0;
  double decel_time_s = 0.5;
  PidGains distance{1.0, 0.05, 0.1};
  PidGains heading{1.5, 0.0, 0.2};
  double integral_limit = 1.0;

  void validate() const {
    if (!(z_stop_m > 0.0 && z_stop_m <= z_setpoint_m && z_setpoint_m <= z_engage_m))
      throw ParameterError("need 0 < z_stop <= z_setpoint <= z_engage");
    if (!(v_max > 0.0) || !(w_max > 0.0)) throw ParameterError("v_max and w_max must be positive");
    if (!(decel_time_s > 0.0)) throw ParameterError("decel_time must be positive");
    for (const auto* g : {&distance, &heading})
      if (g->kp < 0.0 || g->ki < 0.0 || g->kd < 0.0) throw ParameterError("gains must be >= 0");
    if (!(integral_limit > 0.0)) throw ParameterError("integral_limit must be positive");
  }
};

struct ControlCommand {
  double v = 0.0;
  double w = 0.0;  // positive turns left
  bool engaged = false;

  friend bool operator==(const ControlCommand&, const ControlCommand&) = default;
};

struct ControllerState {
  bool engaged = false;
  double integral_z = 0.0;
  double integral_heading = 0.0;
  std::optional<double> prev_error_z;
  std::optional<double> prev_error_heading;
  double last_v = 0.0;
  std::optional<double> occlusion_v0;  // speed when the current occlusion began

  friend bool operator==(const ControllerState&, const ControllerState&) = default;
};

inline ControllerState reset(const ControllerState&) { return ControllerState{}; }

namespace detail {

inline double pid(const PidGains& g, double error, double dt, double limit, double& integral,
                  std::optional<double>& prev) {
  integral = std::clamp(integral + error * dt, -limit, limit);
  const double derivative = prev ? (error - *prev) / dt : 0.0;
  prev = error;
  return g.kp * error + g.ki * integral + g.kd * derivative;
}

}  // namespace detail

struct ControlUpdate {
  ControllerState state;
  ControlCommand command;
};

inline ControlUpdate update(const ControllerState& in, const TrackState& track, double dt,
                            const ControllerConfig& cfg) {
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  ControllerState s = in;
  ControlCommand cmd;

  switch (track.mode) {
    case TrackMode::kSearching:
    case TrackMode::kLost:
      return {ControllerState{}, ControlCommand{}};

    case TrackMode::kOccluded: {
      if (!s.occlusion_v0) s.occlusion_v0 = s.last_v;
      s.prev_error_z.reset();
      s.prev_error_heading.reset();
      const double t = track.time_since_seen_s;
      // Tolerance absorbs summed frame periods (5 * 0.1 != 0.5 exactly).
      const double scale = t + 1e-9 >= cfg.decel_time_s ? 0.0 : 1.0 - t / cfg.decel_time_s;
      cmd.v = std::clamp(*s.occlusion_v0 * scale, 0.0, cfg.v_max);
      cmd.w = 0.0;
      cmd.engaged = s.engaged;
      s.last_v = cmd.v;
      return {s, cmd};
    }

    case TrackMode::kTracking:
      break;
  }

  s.occlusion_v0.reset();
  if (!track.last_measurement) return {ControllerState{}, ControlCommand{}};
  const double z = track.last_measurement->z_m;
  const double bearing_rad = track.last_measurement->bearing_rad;

  if (!s.engaged && z > cfg.z_engage_m) s.engaged = true;
  if (s.engaged && z <= cfg.z_stop_m) s = ControllerState{};
  if (!s.engaged) {
    s.last_v = 0.0;
    return {s, ControlCommand{}};
  }

  const double u_z = detail::pid(cfg.distance, z - cfg.z_setpoint_m, dt, cfg.integral_limit,
                                 s.integral_z, s.prev_error_z);
  // Bearing is positive to the right while w is positive to the left.
  const double u_h = detail::pid(cfg.heading, -bearing_rad, dt, cfg.integral_limit,
                                 s.integral_heading, s.prev_error_heading);
  cmd.v = std::clamp(u_z, 0.0, cfg.v_max);
  cmd.w = std::clamp(u_h, -cfg.w_max, cfg.w_max);
  cmd.engaged = true;
  s.last_v = cmd.v;
  return {s, cmd};
}

}  // namespace stereo_follow
