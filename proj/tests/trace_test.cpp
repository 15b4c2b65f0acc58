#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "stereo_follow/trace.hpp"

namespace stereo_follow {
namespace {

Trace from_modes(const std::string& modes, std::vector<int> ids = {}) {
  Trace t;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    TraceRecord r;
    r.frame = static_cast<std::int64_t>(i);
    r.t_s = 0.1 * static_cast<double>(i);
    r.track_mode = modes[i] == 'T' ? TrackMode::kTracking
                   : modes[i] == 'O' ? TrackMode::kOccluded
                   : modes[i] == 'L' ? TrackMode::kLost
                                     : TrackMode::kSearching;
    if (r.track_mode == TrackMode::kTracking) {
      r.estimated_z_m = 2.0 + 0.01 * static_cast<double>(i);
      if (!ids.empty()) r.tracked_id = ids[i];
    }
    t.push_back(r);
  }
  return t;
}

TEST(Metrics, OcclusionEpisodes) {
  const auto t = from_modes("SSTTOOTTOOOLLTTOO");
  const auto eps = occlusion_episodes(t);
  ASSERT_EQ(eps.size(), 3u);
  EXPECT_EQ(eps[0].first, 4u);
  EXPECT_EQ(eps[0].last, 5u);
  EXPECT_TRUE(eps[1].reacquired);
  EXPECT_FALSE(eps[2].reacquired);
  const auto m = compute_metrics(t, 0.1, std::nullopt);
  EXPECT_EQ(m.occlusion_episodes, 3u);
  EXPECT_NEAR(m.max_reacquire_time_s, 0.5, 1e-12);
  EXPECT_EQ(m.frames_tracking, 6u);
  EXPECT_FALSE(m.identity_switches);
}

TEST(Metrics, IdentitySwitchesCountWrongRuns) {
  const auto t = from_modes("TTTTTTTT", {0, 0, 1, 1, 0, -1, 0, 0});
  EXPECT_EQ(*compute_metrics(t, 0.1, 0).identity_switches, 2u);
  EXPECT_EQ(*compute_metrics(from_modes("TTT", {0, 0, 0}), 0.1, 0).identity_switches, 0u);
}

TEST(TraceCsv, Format) {
  std::ostringstream out;
  write_trace_csv(out, from_modes("TO"));
  EXPECT_EQ(out.str(), "# schema_version: 1\nt_s,estimated_z_m\n0,2\n0.1,\n");
}

TEST(TraceJson, NullsForAbsentFields) {
  const auto j = to_json(from_modes("O")[0]);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_TRUE(j["estimated_z_m"].is_null());
  EXPECT_EQ(j["track_mode"], "OCCLUDED");
}

}  // namespace
}  // namespace stereo_follow
