#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "stereo_follow/control.hpp"

namespace stereo_follow {
namespace {

TrackState tracking(double z, double bearing_rad = 0.0) {
  TrackState t;
  t.mode = TrackMode::kTracking;
  t.last_measurement = DepthMeasurement{z, bearing_rad, 0, 0, 0};
  return t;
}

ControllerConfig p_only(double kp) {
  ControllerConfig c;
  c.distance = {kp, 0.0, 0.0};
  c.heading = {1.5, 0.0, 0.0};
  return c;
}

ControllerState engaged() {
  ControllerState s;
  s.engaged = true;
  return s;
}

TEST(Update, ZeroErrorGivesZeroCommand) {
  const auto r = update(engaged(), tracking(2.0), 0.1, p_only(0.5));
  EXPECT_DOUBLE_EQ(r.command.v, 0.0);
  EXPECT_DOUBLE_EQ(r.command.w, 0.0);
  EXPECT_TRUE(r.command.engaged);
}

TEST(Update, ProportionalDistance) {
  const auto r = update({}, tracking(3.0), 0.1, p_only(0.5));
  EXPECT_DOUBLE_EQ(r.command.v, 0.5);
  EXPECT_TRUE(r.state.engaged);
}

TEST(Update, LostAndSearchingStop) {
  auto s = engaged();
  s.integral_z = 0.4;
  s.last_v = 0.6;
  for (TrackMode m : {TrackMode::kLost, TrackMode::kSearching}) {
    TrackState t;
    t.mode = m;
    const auto r = update(s, t, 0.1, {});
    EXPECT_EQ(r.command, ControlCommand{});
    EXPECT_EQ(r.state, ControllerState{});
  }
}

TEST(Reset, Idempotent) {
  auto s = engaged();
  s.integral_heading = -0.3;
  s.prev_error_z = 1.0;
  EXPECT_EQ(reset(s), ControllerState{});
  EXPECT_EQ(reset(reset(s)), reset(s));
}

TEST(Update, OutputsAlwaysSaturated) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> z(0.1, 20.0);
  std::uniform_real_distribution<double> b(-1.5, 1.5);
  std::uniform_int_distribution<int> mode(0, 3);
  const ControllerConfig cfg;
  ControllerState s;
  for (int i = 0; i < 5000; ++i) {
    auto t = tracking(z(rng), b(rng));
    t.mode = static_cast<TrackMode>(mode(rng));
    t.time_since_seen_s = 0.1 * (i % 30);
    const auto r = update(s, t, 0.1, cfg);
    EXPECT_GE(r.command.v, 0.0);
    EXPECT_LE(r.command.v, cfg.v_max);
    EXPECT_LE(std::abs(r.command.w), cfg.w_max);
    EXPECT_LE(std::abs(r.state.integral_z), cfg.integral_limit);
    s = r.state;
  }
}

TEST(Update, EngageHysteresis) {
  const ControllerConfig cfg;
  ControllerState s;
  // Approaching from close in: not engaged until strictly beyond z_engage.
  for (double z : {1.0, 1.8, 2.0}) {
    const auto r = update(s, tracking(z), 0.1, cfg);
    EXPECT_FALSE(r.command.engaged) << z;
    EXPECT_DOUBLE_EQ(r.command.v, 0.0);
    s = r.state;
  }
  auto r = update(s, tracking(2.1), 0.1, cfg);
  EXPECT_TRUE(r.command.engaged);
  EXPECT_GT(r.command.v, 0.0);
  // Stays engaged between stop and engage distances.
  r = update(r.state, tracking(1.7), 0.1, cfg);
  EXPECT_TRUE(r.command.engaged);
  EXPECT_DOUBLE_EQ(r.command.v, 0.0);  // negative command clamped
  r = update(r.state, tracking(1.5), 0.1, cfg);
  EXPECT_FALSE(r.command.engaged);
  EXPECT_EQ(r.state, ControllerState{});
}

TEST(Update, OcclusionRampsToZero) {
  const ControllerConfig cfg;
  auto r = update({}, tracking(3.0), 0.1, cfg);
  const double v0 = r.command.v;
  ASSERT_GT(v0, 0.0);
  TrackState t = tracking(3.0);
  t.mode = TrackMode::kOccluded;
  double prev = v0;
  for (int k = 1; k <= 8; ++k) {
    t.time_since_seen_s += 0.1;
    r = update(r.state, t, 0.1, cfg);
    EXPECT_LE(r.command.v, prev);
    EXPECT_DOUBLE_EQ(r.command.w, 0.0);
    if (t.time_since_seen_s + 1e-9 >= cfg.decel_time_s) EXPECT_EQ(r.command.v, 0.0) << k;
    else EXPECT_NEAR(r.command.v, v0 * (1.0 - t.time_since_seen_s / cfg.decel_time_s), 1e-12);
    prev = r.command.v;
  }
}

TEST(Update, TurnsTowardTarget) {
  const ControllerConfig cfg;
  // Target to the right (positive bearing) means turn right (negative w).
  EXPECT_LT(update(engaged(), tracking(3.0, 0.2), 0.1, cfg).command.w, 0.0);
  EXPECT_GT(update(engaged(), tracking(3.0, -0.2), 0.1, cfg).command.w, 0.0);
}

TEST(ControllerConfig, Validation) {
  ControllerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.z_stop_m = 2.5;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.distance.kp = -1;
  EXPECT_THROW(c.validate(), ParameterError);
  EXPECT_THROW(update({}, tracking(3.0), 0.0, {}), ParameterError);
}

}  // namespace
}  // namespace stereo_follow
