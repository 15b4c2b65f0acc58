#pragma once

// Keypoint-based person detections (COCO-18 layout) and the torso region
// between shoulders and hips that carries the appearance signature.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "stereo_follow/appearance.hpp"
#include "stereo_follow/errors.hpp"

namespace stereo_follow {

enum class Camera { kLeft, kRight };

inline std::string_view to_string(Camera c) { return c == Camera::kLeft ? "left" : "right"; }

namespace coco {
enum Part : std::size_t {
  kNose = 0,
  kNeck = 1,
  kRShoulder = 2,
  kRElbow = 3,
  kRWrist = 4,
  kLShoulder = 5,
  kLElbow = 6,
  kLWrist = 7,
  kRHip = 8,
  kRKnee = 9,
  kRAnkle = 10,
  kLHip = 11,
  kLKnee = 12,
  kLAnkle = 13,
  kREye = 14,
  kLEye = 15,
  kREar = 16,
  kLEar = 17,
};
inline constexpr std::size_t kNumParts = 18;

// BODY-25 index for each COCO-18 part. BODY-25 adds MidHip (8) and six
// foot points (19-24), which are dropped.
inline constexpr std::array<std::size_t, kNumParts> kFromBody25 = {
    0, 1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18};
inline constexpr std::size_t kBody25Parts = 25;
}  // namespace coco

inline constexpr double kTorsoConfidenceFloor = 0.3;

struct Keypoint {
  double u = 0.0;
  double v = 0.0;
  double confidence = 0.0;
  bool present = false;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct PersonDetection {
  Camera camera = Camera::kLeft;
  std::int64_t frame_index = 0;
  double timestamp_s = 0.0;
  std::array<Keypoint, coco::kNumParts> keypoints{};
  std::vector<HsvPixel> torso_pixels;
  std::optional<int> person_id;  // ground truth, simulator output only
};

struct TorsoRegion {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double center_u = 0.0;
  double center_v = 0.0;

  double area() const noexcept { return (x_max - x_min) * (y_max - y_min); }
};

inline constexpr std::array<std::size_t, 4> kTorsoParts = {coco::kLShoulder, coco::kRShoulder,
                                                           coco::kLHip, coco::kRHip};

inline bool has_torso(const PersonDetection& d) {
  return std::all_of(kTorsoParts.begin(), kTorsoParts.end(), [&](std::size_t i) {
    const auto& k = d.keypoints[i];
    return k.present && k.confidence >= kTorsoConfidenceFloor;
  });
}

/// Shoulder-hip bounding rectangle; center is the mean of the four points.
inline TorsoRegion torso_region(const PersonDetection& d) {
  if (!has_torso(d)) throw NoTorsoError("shoulders and hips are not all confidently detected");
  TorsoRegion r;
  const auto& first = d.keypoints[kTorsoParts[0]];
  r.x_min = r.x_max = first.u;
  r.y_min = r.y_max = first.v;
  std::array<double, 4> us{};
  std::array<double, 4> vs{};
  for (std::size_t j = 0; j < kTorsoParts.size(); ++j) {
    const auto& k = d.keypoints[kTorsoParts[j]];
    r.x_min = std::min(r.x_min, k.u);
    r.x_max = std::max(r.x_max, k.u);
    r.y_min = std::min(r.y_min, k.v);
    r.y_max = std::max(r.y_max, k.v);
    us[j] = k.u;
    vs[j] = k.v;
  }
  // Summing in sorted order makes the center exactly independent of which
  // keypoint holds which value.
  std::sort(us.begin(), us.end());
  std::sort(vs.begin(), vs.end());
  r.center_u = (us[0] + us[1] + us[2] + us[3]) / 4.0;
  r.center_v = (vs[0] + vs[1] + vs[2] + vs[3]) / 4.0;
  return r;
}

inline HueHistogram detection_histogram(const PersonDetection& d,
                                        double min_saturation = kDefaultMinSaturation) {
  (void)torso_region(d);
  if (d.torso_pixels.empty()) throw NoAppearanceDataError("detection carries no torso pixels");
  auto h = build_histogram(d.torso_pixels, min_saturation);
  if (h.empty()) throw NoAppearanceDataError("no torso pixel survived the saturation filter");
  return h;
}

}  // namespace stereo_follow
