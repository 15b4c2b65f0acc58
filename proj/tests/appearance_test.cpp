#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "stereo_follow/appearance.hpp"
#include "stereo_follow/template_io.hpp"
#include "test_support.hpp"

namespace stereo_follow {
namespace {

using testing::uniform_hue;

TEST(RgbToHsv, Primaries) {
  auto red = rgb_to_hsv({1, 0, 0});
  EXPECT_DOUBLE_EQ(red.h, 0.0);
  EXPECT_DOUBLE_EQ(red.s, 1.0);
  EXPECT_DOUBLE_EQ(red.v, 1.0);
  EXPECT_TRUE(red.hue_defined);

  auto green = rgb_to_hsv({0, 1, 0});
  EXPECT_DOUBLE_EQ(green.h, 120.0);
  EXPECT_DOUBLE_EQ(green.s, 1.0);
  EXPECT_DOUBLE_EQ(green.v, 1.0);

  EXPECT_DOUBLE_EQ(rgb_to_hsv({0, 0, 1}).h, 240.0);
  EXPECT_DOUBLE_EQ(rgb_to_hsv({1, 0, 1}).h, 300.0);
  EXPECT_DOUBLE_EQ(rgb_to_hsv({1, 1, 0}).h, 60.0);
}

TEST(RgbToHsv, Achromatic) {
  auto gray = rgb_to_hsv({0.5, 0.5, 0.5});
  EXPECT_DOUBLE_EQ(gray.s, 0.0);
  EXPECT_DOUBLE_EQ(gray.v, 0.5);
  EXPECT_FALSE(gray.hue_defined);
  auto black = rgb_to_hsv({0, 0, 0});
  EXPECT_DOUBLE_EQ(black.s, 0.0);
  EXPECT_FALSE(black.hue_defined);
}

TEST(RgbToHsv, MagentaSideWrapsBelowZero) {
  // r max, b > g: raw sector value is negative.
  auto p = rgb_to_hsv({1.0, 0.0, 0.5});
  EXPECT_NEAR(p.h, 330.0, 1e-12);
}

TEST(HueBin, Circular) {
  EXPECT_EQ(hue_bin(0.0), 0u);
  EXPECT_EQ(hue_bin(9.999), 0u);
  EXPECT_EQ(hue_bin(10.0), 1u);
  EXPECT_EQ(hue_bin(359.9), 35u);
  EXPECT_EQ(hue_bin(360.0), 0u);
  EXPECT_EQ(hue_bin(-5.0), 35u);
}

TEST(BuildHistogram, SingleBin) {
  const auto px = uniform_hue(5.0, 100);
  const auto h = build_histogram(px, 0.1);
  EXPECT_EQ(h.sample_count(), 100u);
  EXPECT_DOUBLE_EQ(h[0], 1.0);
  for (std::size_t i = 1; i < kHueBins; ++i) EXPECT_EQ(h[i], 0.0);
}

TEST(BuildHistogram, EvenSplit) {
  auto px = uniform_hue(5.0, 50);
  const auto more = uniform_hue(15.0, 50);
  px.insert(px.end(), more.begin(), more.end());
  const auto h = build_histogram(px, 0.1);
  EXPECT_DOUBLE_EQ(h[0], 0.5);
  EXPECT_DOUBLE_EQ(h[1], 0.5);
}

TEST(BuildHistogram, GrayIsEmpty) {
  std::vector<HsvPixel> gray(100, HsvPixel{0.0, 0.0, 0.5, false});
  const auto h = build_histogram(gray, 0.1);
  EXPECT_EQ(h.sample_count(), 0u);
  EXPECT_TRUE(h.empty());
}

TEST(BuildHistogram, SaturationFloor) {
  auto px = uniform_hue(100.0, 10, 0.05);
  const auto vivid = uniform_hue(200.0, 30, 0.5);
  px.insert(px.end(), vivid.begin(), vivid.end());
  const auto h = build_histogram(px, 0.1);
  EXPECT_EQ(h.sample_count(), 30u);
  EXPECT_DOUBLE_EQ(h[20], 1.0);
}

TEST(Similarity, Examples) {
  const auto a = build_histogram(uniform_hue(5.0, 10));
  EXPECT_DOUBLE_EQ(similarity(a, a), 1.0);

  const auto b = build_histogram(uniform_hue(185.0, 10));
  EXPECT_DOUBLE_EQ(similarity(a, b), 0.0);

  HueHistogram::Bins x{};
  HueHistogram::Bins y{};
  x[0] = x[1] = 0.5;
  y[0] = y[2] = 0.5;
  EXPECT_DOUBLE_EQ(similarity(HueHistogram(x, 2), HueHistogram(y, 2)), 0.5);
}

TEST(Similarity, EmptyIsAnError) {
  const auto a = build_histogram(uniform_hue(5.0, 10));
  EXPECT_THROW(similarity(a, HueHistogram{}), NoAppearanceDataError);
  EXPECT_THROW(similarity(HueHistogram{}, a), NoAppearanceDataError);
}

TEST(IsTarget, StrictlyExceeds) {
  EXPECT_TRUE(is_target(0.75, 0.6));
  EXPECT_FALSE(is_target(0.6, 0.6));
  EXPECT_FALSE(is_target(0.0, 0.6));
}

std::vector<HsvPixel> random_pixels(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 300);
  std::uniform_real_distribution<double> hue(0.0, 360.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  // A few clusters so histograms overlap partially.
  const double centre = hue(rng);
  std::vector<HsvPixel> px;
  for (int i = 0; i < n; ++i) {
    double h = unit(rng) < 0.7 ? std::fmod(centre + 40.0 * unit(rng), 360.0) : hue(rng);
    const double s = unit(rng);
    px.push_back({h, s, unit(rng), s > 0.0});
  }
  return px;
}

TEST(HistogramProperties, NormalizationSymmetryBrightnessPermutation) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> scale(1e-6, 1.0);
  for (int c = 0; c < 500; ++c) {
    auto pa = random_pixels(rng);
    auto pb = random_pixels(rng);
    const auto ha = build_histogram(pa, 0.1);
    const auto hb = build_histogram(pb, 0.1);
    if (!ha.empty()) {
      double sum = 0.0;
      for (double b : ha.bins()) {
        EXPECT_GE(b, 0.0);
        sum += b;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
      EXPECT_DOUBLE_EQ(similarity(ha, ha), 1.0);
    }
    if (!ha.empty() && !hb.empty()) {
      const double s = similarity(ha, hb);
      EXPECT_EQ(s, similarity(hb, ha));
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
    const double k = scale(rng);
    auto dim = pa;
    for (auto& p : dim) p.v *= k;
    EXPECT_EQ(build_histogram(dim, 0.1), ha);
    std::shuffle(pa.begin(), pa.end(), rng);
    EXPECT_EQ(build_histogram(pa, 0.1), ha);
  }
}

TEST(Template, RejectsEmpty) {
  std::vector<HsvPixel> gray(10, HsvPixel{0.0, 0.0, 0.5, false});
  EXPECT_THROW(make_template(gray, "x"), NoAppearanceDataError);
}

TEST(Template, JsonRoundTripIsBitExact) {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 50; ++c) {
    auto px = random_pixels(rng);
    auto h = build_histogram(px, 0.1);
    if (h.empty()) continue;
    Template t{h, "case-" + std::to_string(c), 0.1};
    const auto back = template_from_json(nlohmann::json::parse(to_json(t).dump()));
    EXPECT_EQ(back.histogram, t.histogram);
    EXPECT_EQ(back.label, t.label);
    EXPECT_EQ(back.min_saturation, t.min_saturation);
  }
}

TEST(Template, RejectsWrongBinCount) {
  nlohmann::json j = {{"label", "x"}, {"bins", {1.0, 0.0}}, {"sample_count", 3}};
  EXPECT_THROW(template_from_json(j), ParseError);
}

}  // namespace
}  // namespace stereo_follow
