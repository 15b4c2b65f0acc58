#pragma once

// Parallel pinhole stereo pair: projection, depth from horizontal disparity
// and bearing. Cameras sit at x = -b/2 (left) and x = +b/2 (right) around
// the rig origin; x right, y down, z forward. Coordinates are continuous.

#include <cmath>
#include <numbers>

#include "stereo_follow/errors.hpp"

namespace stereo_follow {

struct PixelSize {
  int width = 640;
  int height = 480;
};

struct RigPoint3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct StereoProjection {
  double u_left = 0.0;
  double v_left = 0.0;
  double u_right = 0.0;
  double v_right = 0.0;
};

struct DepthMeasurement {
  double z_m = 0.0;
  double bearing_rad = 0.0;
  double u_left = 0.0;
  double u_right = 0.0;
  double timestamp_s = 0.0;
};

/// Horizontal focal length in pixels for an image `width` wide spanning
/// `hfov_deg` degrees.
inline double focal_px_from_fov(double width, double hfov_deg) {
  if (!(width > 0.0)) throw ParameterError("image width must be positive");
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0))
    throw ParameterError("horizontal field of view must lie in (0, 180) degrees");
  return (width / 2.0) / std::tan(hfov_deg * std::numbers::pi / 360.0);
}

class StereoRig {
 public:
  /// Rig from the published parameters; focal length derived from the FOV,
  /// principal point at the image center.
  static StereoRig from_fov(double baseline_m, PixelSize resolution, double hfov_deg) {
    if (resolution.width <= 0 || resolution.height <= 0)
      throw ParameterError("resolution must be positive");
    const double f = focal_px_from_fov(resolution.width, hfov_deg);
    return StereoRig(baseline_m, f, (resolution.width - 1) / 2.0,
                     (resolution.height - 1) / 2.0, resolution);
  }

  StereoRig(double baseline_m, double focal_px, double cx, double cy, PixelSize resolution)
      : baseline_m_(baseline_m), focal_px_(focal_px), cx_(cx), cy_(cy), resolution_(resolution) {
    if (!(baseline_m > 0.0)) throw ParameterError("baseline must be positive");
    if (!(focal_px > 0.0)) throw ParameterError("focal length must be positive");
    if (resolution.width <= 0 || resolution.height <= 0)
      throw ParameterError("resolution must be positive");
  }

  double baseline_m() const noexcept { return baseline_m_; }
  double focal_px() const noexcept { return focal_px_; }
  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }
  PixelSize resolution() const noexcept { return resolution_; }

  double hfov_deg() const noexcept {
    return 2.0 * std::atan((resolution_.width / 2.0) / focal_px_) * 180.0 / std::numbers::pi;
  }

  bool in_image(double u, double v) const noexcept {
    return u >= 0.0 && u <= resolution_.width - 1.0 && v >= 0.0 && v <= resolution_.height - 1.0;
  }

 private:
  double baseline_m_;
  double focal_px_;
  double cx_;
  double cy_;
  PixelSize resolution_;
};

inline StereoProjection project(const StereoRig& rig, const RigPoint3& p) {
  if (!(p.z > 0.0)) throw BehindCameraError("point is at or behind the image plane");
  const double half_b = rig.baseline_m() / 2.0;
  const double f = rig.focal_px();
  StereoProjection out;
  out.u_left = rig.cx() + f * (p.x + half_b) / p.z;
  out.u_right = rig.cx() + f * (p.x - half_b) / p.z;
  out.v_left = rig.cy() + f * p.y / p.z;
  out.v_right = out.v_left;
  return out;
}

/// Z = b * (f/delta) / (u_l - u_r).
inline double depth_from_disparity(const StereoRig& rig, double u_left, double u_right) {
  const double disparity = u_left - u_right;
  if (!(disparity > 0.0))
    throw NonPositiveDisparityError("disparity must be positive for a finite depth");
  return rig.baseline_m() * rig.focal_px() / disparity;
}

/// Positive when the target is right of the optical axis.
inline double bearing(const StereoRig& rig, double u_center) {
  return std::atan((u_center - rig.cx()) / rig.focal_px());
}

/// First-order depth change for one pixel of disparity error at depth z.
inline double depth_error_per_pixel(const StereoRig& rig, double z_m) {
  return z_m * z_m / (rig.baseline_m() * rig.focal_px());
}

}  // namespace stereo_follow
