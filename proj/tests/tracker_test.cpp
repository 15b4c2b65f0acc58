#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "stereo_follow/tracker.hpp"
#include "test_support.hpp"

namespace stereo_follow {
namespace {

using testing::box_detection;

StereoRig rounded_rig() { return StereoRig(0.094, 628.03, 319.5, 239.5, {640, 480}); }

Template bin0_template() { return make_template(testing::uniform_hue(5.0, 100), "target"); }

// Detection whose histogram overlaps the bin-0 template by exactly in_bin0/total.
PersonDetection scored(double cu, int in_bin0, int total, double half = 10.0) {
  auto d = box_detection(cu, 240, half, half);
  d.torso_pixels = testing::uniform_hue(5.0, in_bin0);
  const auto rest = testing::uniform_hue(185.0, total - in_bin0);
  d.torso_pixels.insert(d.torso_pixels.end(), rest.begin(), rest.end());
  return d;
}

TEST(Identify, PicksHighestAboveThreshold) {
  const auto t = bin0_template();
  const std::vector<PersonDetection> dets{scored(100, 3, 10), scored(200, 3, 4), scored(300, 9, 10)};
  const auto c = identify(dets, &t, {});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->index, 2u);
  EXPECT_NEAR(*c->similarity, 0.9, 1e-12);
}

TEST(Identify, NoneAboveThreshold) {
  const auto t = bin0_template();
  const std::vector<PersonDetection> dets{scored(100, 3, 10), scored(200, 3, 5)};
  EXPECT_FALSE(identify(dets, &t, {}));
  EXPECT_FALSE(identify(std::vector<PersonDetection>{}, &t, {}));
}

TEST(Identify, TieBrokenByAreaThenIndex) {
  const auto t = bin0_template();
  // Areas 400 (half 10) and 900 (half 15) with equal scores.
  const std::vector<PersonDetection> dets{scored(100, 4, 5, 10.0), scored(300, 4, 5, 15.0)};
  const auto c = identify(dets, &t, {});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->index, 1u);
  EXPECT_DOUBLE_EQ(c->torso.area(), 900.0);

  const std::vector<PersonDetection> same{scored(100, 4, 5), scored(300, 4, 5)};
  EXPECT_EQ(identify(same, &t, {})->index, 0u);
}

TEST(Identify, SkipsDetectionsWithoutTorsoOrPixels) {
  const auto t = bin0_template();
  auto no_torso = scored(100, 10, 10);
  no_torso.keypoints[coco::kLHip].present = false;
  auto no_pixels = box_detection(200, 240, 10, 10);
  const std::vector<PersonDetection> dets{no_torso, no_pixels, scored(300, 7, 10)};
  EXPECT_EQ(identify(dets, &t, {})->index, 2u);
}

TEST(Identify, SinglePersonBypass) {
  TrackerConfig cfg;
  cfg.assume_single_person = true;
  const std::vector<PersonDetection> one{box_detection(100, 240, 10, 10)};
  const auto c = identify(one, nullptr, cfg);
  ASSERT_TRUE(c);
  EXPECT_FALSE(c->similarity);
  const std::vector<PersonDetection> two{box_detection(100, 240, 10, 10), box_detection(200, 240, 10, 10)};
  EXPECT_FALSE(identify(two, nullptr, cfg));
}

TEST(Fuse, CenteredTwoMeters) {
  const auto o = fuse(torso_region(box_detection(334.258705, 240, 20, 30)),
                      torso_region(box_detection(304.741295, 240, 20, 30)), rounded_rig(), {}, 1.5);
  EXPECT_NEAR(o.measurement.z_m, 2.000, 1e-3);
  EXPECT_NEAR(o.measurement.bearing_rad, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(o.measurement.timestamp_s, 1.5);
}

TEST(Fuse, Failures) {
  const auto rig = rounded_rig();
  const TrackerConfig cfg;
  const auto at = [](double u, double v) { return torso_region(box_detection(u, v, 10, 10)); };
  EXPECT_THROW(fuse(at(300, 240), at(320, 240), rig, cfg, 0), BadMatchError);
  EXPECT_THROW(fuse(at(320, 240), at(320, 240), rig, cfg, 0), BadMatchError);
  EXPECT_THROW(fuse(at(340, 100), at(300, 140), rig, cfg, 0), EpipolarViolationError);
  EXPECT_NO_THROW(fuse(at(340, 100), at(300, 120), rig, cfg, 0));
  Candidate c{0, 0.9, at(340, 240)};
  EXPECT_THROW(fuse(std::optional<Candidate>{c}, std::nullopt, rig, cfg, 0), NoFusionError);
  EXPECT_THROW(fuse(std::nullopt, std::optional<Candidate>{c}, rig, cfg, 0), NoFusionError);
  EXPECT_FALSE(try_fuse(std::nullopt, std::nullopt, rig, cfg, 0));
}

FusedObservation obs(double z) {
  FusedObservation o;
  o.measurement.z_m = z;
  return o;
}

TEST(Step, Transitions) {
  const TrackerConfig cfg;
  TrackState s;
  s = step(s, std::nullopt, 0.1, cfg);
  EXPECT_EQ(s.mode, TrackMode::kSearching);
  s = step(s, obs(3.0), 0.1, cfg);
  EXPECT_EQ(s.mode, TrackMode::kTracking);
  EXPECT_DOUBLE_EQ(s.last_measurement->z_m, 3.0);
  s = step(s, std::nullopt, 0.1, cfg);
  EXPECT_EQ(s.mode, TrackMode::kOccluded);
  EXPECT_DOUBLE_EQ(s.last_measurement->z_m, 3.0);
  for (int i = 0; i < 19; ++i) s = step(s, std::nullopt, 0.1, cfg);
  EXPECT_EQ(s.mode, TrackMode::kOccluded);  // 2.0 s unseen is not yet past t_lost
  s = step(s, std::nullopt, 0.1, cfg);
  EXPECT_EQ(s.mode, TrackMode::kLost);
  s = step(s, obs(2.5), 0.1, cfg);
  EXPECT_EQ(s.mode, TrackMode::kTracking);
  EXPECT_DOUBLE_EQ(s.time_since_seen_s, 0.0);
}

TEST(Step, TotalAndDeterministic) {
  const TrackerConfig cfg;
  std::mt19937_64 rng(11);
  std::bernoulli_distribution seen(0.6);
  std::uniform_real_distribution<double> dt(0.01, 0.5);
  for (TrackMode m : {TrackMode::kSearching, TrackMode::kTracking, TrackMode::kOccluded, TrackMode::kLost}) {
    TrackState a{m, DepthMeasurement{2.0, 0.0, 0, 0, 0}, 0.0};
    TrackState b = a;
    for (int i = 0; i < 500; ++i) {
      const double d = dt(rng);
      const auto f = seen(rng) ? std::optional<FusedObservation>(obs(1.0 + i * 0.01)) : std::nullopt;
      a = step(a, f, d, cfg);
      b = step(b, f, d, cfg);
      EXPECT_EQ(a.mode, b.mode);
      EXPECT_EQ(a.time_since_seen_s, b.time_since_seen_s);
      if (f) {
        EXPECT_EQ(a.mode, TrackMode::kTracking);
      }
    }
  }
  EXPECT_THROW(step({}, std::nullopt, 0.0, cfg), ParameterError);
}

}  // namespace
}  // namespace stereo_follow
