#pragma once

// Late fusion: each camera picks its own target by appearance, the two
// torso centers are fused into one depth/bearing measurement, and a small
// state machine rides through frames where that fails.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "stereo_follow/appearance.hpp"
#include "stereo_follow/detection.hpp"
#include "stereo_follow/errors.hpp"
#include "stereo_follow/stereo_geometry.hpp"

namespace stereo_follow {

enum class TrackMode { kSearching, kTracking, kOccluded, kLost };

inline std::string_view to_string(TrackMode m) {
  switch (m) {
    case TrackMode::kSearching: return "SEARCHING";
    case TrackMode::kTracking: return "TRACKING";
    case TrackMode::kOccluded: return "OCCLUDED";
    case TrackMode::kLost: return "LOST";
  }
  return "?";
}

struct TrackerConfig {
  double threshold = kDefaultSimilarityThreshold;
  double epipolar_tol_px = 20.0;
  double t_lost_s = 2.0;
  double min_saturation = kDefaultMinSaturation;
  // Skip the similarity gate when a camera sees exactly one person.
  bool assume_single_person = false;

  void validate() const {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ParameterError("threshold must lie in (0, 1)");
    if (!(epipolar_tol_px >= 0.0)) throw ParameterError("epipolar_tol must be >= 0");
    if (!(t_lost_s > 0.0)) throw ParameterError("t_lost must be > 0");
    if (!(min_saturation >= 0.0 && min_saturation <= 1.0))
      throw ParameterError("min_saturation must lie in [0, 1]");
  }
};

struct Candidate {
  std::size_t index = 0;  // position in the camera's detection list
  std::optional<double> similarity;
  TorsoRegion torso;
};

/// Best qualifying detection in one camera: highest similarity above the
/// threshold, then larger torso area, then earlier position.
inline std::optional<Candidate> identify(std::span<const PersonDetection> detections,
                                         const Template* tmpl, const TrackerConfig& cfg) {
  if (cfg.assume_single_person && detections.size() == 1) {
    if (!has_torso(detections[0])) return std::nullopt;
    Candidate c{0, std::nullopt, torso_region(detections[0])};
    if (tmpl && !tmpl->histogram.empty()) {
      try {
        c.similarity = similarity(detection_histogram(detections[0], cfg.min_saturation), tmpl->histogram);
      } catch (const NoAppearanceDataError&) {
      }
    }
    return c;
  }
  if (!tmpl || tmpl->histogram.empty()) return std::nullopt;

  std::optional<Candidate> best;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (!has_torso(d)) continue;
    double score;
    try {
      score = similarity(detection_histogram(d, cfg.min_saturation), tmpl->histogram);
    } catch (const NoAppearanceDataError&) {
      continue;
    }
    if (!is_target(score, cfg.threshold)) continue;
    Candidate c{i, score, torso_region(d)};
    if (!best || score > *best->similarity ||
        (score == *best->similarity && c.torso.area() > best->torso.area())) {
      best = c;
    }
  }
  return best;
}

struct FusedObservation {
  double u_left_center = 0.0;
  double u_right_center = 0.0;
  double v_left_center = 0.0;
  double v_right_center = 0.0;
  std::optional<double> similarity_left;
  std::optional<double> similarity_right;
  DepthMeasurement measurement;
};

inline FusedObservation fuse(const TorsoRegion& left, const TorsoRegion& right, const StereoRig& rig,
                             const TrackerConfig& cfg, double t_s) {
  if (std::abs(left.center_v - right.center_v) > cfg.epipolar_tol_px)
    throw EpipolarViolationError("left/right centers differ vertically beyond the tolerance");
  double z;
  try {
    z = depth_from_disparity(rig, left.center_u, right.center_u);
  } catch (const NonPositiveDisparityError&) {
    throw BadMatchError("non-positive disparity between left and right targets");
  }
  FusedObservation o;
  o.u_left_center = left.center_u;
  o.u_right_center = right.center_u;
  o.v_left_center = left.center_v;
  o.v_right_center = right.center_v;
  o.measurement.z_m = z;
  o.measurement.bearing_rad = bearing(rig, (left.center_u + right.center_u) / 2.0);
  o.measurement.u_left = left.center_u;
  o.measurement.u_right = right.center_u;
  o.measurement.timestamp_s = t_s;
  return o;
}

inline FusedObservation fuse(const std::optional<Candidate>& left,
                             const std::optional<Candidate>& right, const StereoRig& rig,
                             const TrackerConfig& cfg, double t_s) {
  if (!left || !right) throw NoFusionError("target not identified in both cameras");
  auto o = fuse(left->torso, right->torso, rig, cfg, t_s);
  o.similarity_left = left->similarity;
  o.similarity_right = right->similarity;
  return o;
}

/// Fusion for the frame loop: every failure is a miss.
inline std::optional<FusedObservation> try_fuse(const std::optional<Candidate>& left,
                                                const std::optional<Candidate>& right,
                                                const StereoRig& rig, const TrackerConfig& cfg,
                                                double t_s) {
  try {
    return fuse(left, right, rig, cfg, t_s);
  } catch (const NoFusionError&) {
  } catch (const BadMatchError&) {
  } catch (const EpipolarViolationError&) {
  }
  return std::nullopt;
}

struct TrackState {
  TrackMode mode = TrackMode::kSearching;
  std::optional<DepthMeasurement> last_measurement;
  double time_since_seen_s = 0.0;
};

inline TrackState step(const TrackState& state, const std::optional<FusedObservation>& fused,
                       double dt, const TrackerConfig& cfg) {
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  TrackState next = state;
  if (fused) {
    next.mode = TrackMode::kTracking;
    next.last_measurement = fused->measurement;
    next.time_since_seen_s = 0.0;
    return next;
  }
  next.time_since_seen_s += dt;
  switch (state.mode) {
    case TrackMode::kSearching:
    case TrackMode::kLost:
      break;
    case TrackMode::kTracking:
    case TrackMode::kOccluded:
      // Tolerance absorbs summed frame periods (20 * 0.1 != 2.0 exactly).
      next.mode = next.time_since_seen_s > cfg.t_lost_s + 1e-9 ? TrackMode::kLost : TrackMode::kOccluded;
      break;
  }
  return next;
}

}  // namespace stereo_follow
