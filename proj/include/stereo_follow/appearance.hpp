#pragma once

// Hue-only appearance model: HSV conversion, 36-bin hue histograms,
// histogram-intersection similarity and the threshold gate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "stereo_follow/errors.hpp"

namespace stereo_follow {

inline constexpr std::size_t kHueBins = 36;
inline constexpr double kHueBinWidthDeg = 360.0 / kHueBins;
inline constexpr double kDefaultMinSaturation = 0.1;
inline constexpr double kDefaultSimilarityThreshold = 0.6;

struct RgbPixel {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

struct HsvPixel {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;
  double v = 0.0;
  bool hue_defined = true;
};

inline HsvPixel rgb_to_hsv(const RgbPixel& p) {
  const double mx = std::max({p.r, p.g, p.b});
  const double mn = std::min({p.r, p.g, p.b});
  const double chroma = mx - mn;
  HsvPixel out;
  out.v = mx;
  out.s = mx > 0.0 ? chroma / mx : 0.0;
  if (chroma <= 0.0) {
    out.h = 0.0;
    out.hue_defined = false;
    return out;
  }
  double h;
  if (mx == p.r) {
    h = 60.0 * std::fmod((p.g - p.b) / chroma, 6.0);
  } else if (mx == p.g) {
    h = 60.0 * ((p.b - p.r) / chroma + 2.0);
  } else {
    h = 60.0 * ((p.r - p.g) / chroma + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

/// Circular bin index for a hue in degrees.
inline std::size_t hue_bin(double h_deg) {
  double h = std::fmod(h_deg, 360.0);
  if (h < 0.0) h += 360.0;
  auto idx = static_cast<std::size_t>(std::floor(h / kHueBinWidthDeg));
  return idx % kHueBins;
}

class HueHistogram {
 public:
  using Bins = std::array<double, kHueBins>;

  HueHistogram() { bins_.fill(0.0); }
  HueHistogram(const Bins& bins, std::size_t sample_count) : bins_(bins), sample_count_(sample_count) {}

  const Bins& bins() const noexcept { return bins_; }
  double operator[](std::size_t i) const { return bins_.at(i); }
  std::size_t sample_count() const noexcept { return sample_count_; }
  bool empty() const noexcept { return sample_count_ == 0; }

  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(bins_.begin(), bins_.end()) - bins_.begin());
  }

  friend bool operator==(const HueHistogram&, const HueHistogram&) = default;

 private:
  Bins bins_{};
  std::size_t sample_count_ = 0;
};

/// Pixels whose saturation is below `min_saturation`, or whose hue is
/// undefined, are dropped. The survivors are normalized to unit mass.
inline HueHistogram build_histogram(std::span<const HsvPixel> pixels,
                                    double min_saturation = kDefaultMinSaturation) {
  std::array<std::size_t, kHueBins> counts{};
  std::size_t n = 0;
  for (const auto& p : pixels) {
    if (!p.hue_defined || p.s <= 0.0 || p.s < min_saturation) continue;
    ++counts[hue_bin(p.h)];
    ++n;
  }
  HueHistogram::Bins bins{};
  bins.fill(0.0);
  if (n == 0) return HueHistogram(bins, 0);
  // Integer counts keep the result independent of pixel order.
  for (std::size_t i = 0; i < kHueBins; ++i)
    bins[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return HueHistogram(bins, n);
}

/// Histogram intersection, in [0, 1]. Dividing by the larger of the two
/// (rounded) bin sums makes self-similarity exactly 1.
inline double similarity(const HueHistogram& a, const HueHistogram& b) {
  if (a.empty() || b.empty()) throw NoAppearanceDataError("similarity of an empty histogram");
  double s = 0.0;
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (std::size_t i = 0; i < kHueBins; ++i) {
    s += std::min(a.bins()[i], b.bins()[i]);
    sum_a += a.bins()[i];
    sum_b += b.bins()[i];
  }
  return std::clamp(s / std::max(sum_a, sum_b), 0.0, 1.0);
}

/// Strict: the score must exceed the threshold.
inline bool is_target(double score, double threshold) { return score > threshold; }

struct Template {
  HueHistogram histogram;
  std::string label;
  double min_saturation = kDefaultMinSaturation;
};

inline Template make_template(std::span<const HsvPixel> pixels, std::string label,
                              double min_saturation = kDefaultMinSaturation) {
  Template t{build_histogram(pixels, min_saturation), std::move(label), min_saturation};
  if (t.histogram.empty())
    throw NoAppearanceDataError("no pixel survived the saturation filter");
  return t;
}

}  // namespace stereo_follow
