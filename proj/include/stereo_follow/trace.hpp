#pragma once

// Per-frame trace records, summary metrics, and their file formats:
// trace.jsonl (one record per line), trace.csv (t_s, estimated_z_m) and
// metrics.json. Every output carries schema_version.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stereo_follow/tracker.hpp"

namespace stereo_follow {

inline constexpr int kTraceSchemaVersion = 1;

struct TraceRecord {
  std::int64_t frame = 0;
  double t_s = 0.0;
  std::optional<double> true_distance_m;  // simulation only
  std::optional<double> estimated_z_m;    // TRACKING frames only
  std::optional<double> bearing_rad;      // TRACKING frames only
  TrackMode track_mode = TrackMode::kSearching;
  double v_cmd = 0.0;
  double w_cmd = 0.0;
  bool engaged = false;
  std::optional<double> similarity_left;
  std::optional<double> similarity_right;
  // Ground truth of the fused pair: the shared person id, -1 when the two
  // cameras chose different people. Absent without ids.
  std::optional<int> tracked_id;
  // Similarity of the true target's own detection in each camera (simulation).
  std::optional<double> target_similarity_left;
  std::optional<double> target_similarity_right;
};

using Trace = std::vector<TraceRecord>;

struct Metrics {
  std::size_t frames_total = 0;
  std::size_t frames_tracking = 0;
  std::optional<std::size_t> identity_switches;
  std::size_t occlusion_episodes = 0;
  double max_reacquire_time_s = 0.0;
  std::optional<double> mean_abs_distance_error_m;
  std::optional<double> min_true_distance_m;
};

/// A maximal run of non-TRACKING frames after tracking first started.
struct OcclusionEpisode {
  std::size_t first = 0;  // first missed record
  std::size_t last = 0;   // last missed record
  bool reacquired = false;
};

inline std::vector<OcclusionEpisode> occlusion_episodes(const Trace& trace) {
  std::vector<OcclusionEpisode> eps;
  bool started = false;
  std::optional<OcclusionEpisode> open;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const bool tracking = trace[i].track_mode == TrackMode::kTracking;
    if (tracking) {
      if (open) {
        open->reacquired = true;
        eps.push_back(*open);
        open.reset();
      }
      started = true;
    } else if (started) {
      if (!open) open = OcclusionEpisode{i, i, false};
      open->last = i;
    }
  }
  if (open) eps.push_back(*open);
  return eps;
}

/// `dt` is the nominal frame period; an episode of n missed frames lasts n*dt.
/// `target_id` enables identity accounting when records carry ids.
inline Metrics compute_metrics(const Trace& trace, double dt, std::optional<int> target_id) {
  Metrics m;
  m.frames_total = trace.size();
  bool have_ids = false;
  std::size_t switches = 0;
  bool prev_wrong = false;
  double err_sum = 0.0;
  std::size_t err_n = 0;
  bool engaged_once = false;
  for (const auto& r : trace) {
    if (r.true_distance_m)
      m.min_true_distance_m = std::min(m.min_true_distance_m.value_or(
                                           std::numeric_limits<double>::infinity()),
                                       *r.true_distance_m);
    engaged_once = engaged_once || r.engaged;
    if (r.track_mode != TrackMode::kTracking) continue;
    ++m.frames_tracking;
    if (r.tracked_id && target_id) {
      have_ids = true;
      const bool wrong = *r.tracked_id != *target_id;
      if (wrong && !prev_wrong) ++switches;
      prev_wrong = wrong;
    }
    if (engaged_once && r.true_distance_m && r.estimated_z_m) {
      err_sum += std::abs(*r.estimated_z_m - *r.true_distance_m);
      ++err_n;
    }
  }
  if (have_ids) m.identity_switches = switches;
  if (err_n > 0) m.mean_abs_distance_error_m = err_sum / static_cast<double>(err_n);
  const auto eps = occlusion_episodes(trace);
  m.occlusion_episodes = eps.size();
  for (const auto& e : eps)
    if (e.reacquired)
      m.max_reacquire_time_s =
          std::max(m.max_reacquire_time_s, static_cast<double>(e.last - e.first + 1) * dt);
  return m;
}

namespace detail {

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

/// Shortest decimal string that parses back to the same double.
inline std::string shortest(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline nlohmann::json to_json(const TraceRecord& r) {
  nlohmann::json j = {{"schema_version", kTraceSchemaVersion},
                      {"frame", r.frame},
                      {"t_s", r.t_s},
                      {"true_distance_m", detail::opt(r.true_distance_m)},
                      {"estimated_z_m", detail::opt(r.estimated_z_m)},
                      {"bearing_rad", detail::opt(r.bearing_rad)},
                      {"track_mode", std::string(to_string(r.track_mode))},
                      {"v_cmd", r.v_cmd},
                      {"w_cmd", r.w_cmd},
                      {"engaged", r.engaged},
                      {"similarity_left", detail::opt(r.similarity_left)},
                      {"similarity_right", detail::opt(r.similarity_right)},
                      {"tracked_id", detail::opt(r.tracked_id)},
                      {"target_similarity_left", detail::opt(r.target_similarity_left)},
                      {"target_similarity_right", detail::opt(r.target_similarity_right)}};
  return j;
}

inline nlohmann::json to_json(const Metrics& m) {
  return {{"schema_version", kTraceSchemaVersion},
          {"frames_total", m.frames_total},
          {"frames_tracking", m.frames_tracking},
          {"identity_switches", detail::opt(m.identity_switches)},
          {"occlusion_episodes", m.occlusion_episodes},
          {"max_reacquire_time_s", m.max_reacquire_time_s},
          {"mean_abs_distance_error_m", detail::opt(m.mean_abs_distance_error_m)},
          {"min_true_distance_m", detail::opt(m.min_true_distance_m)}};
}

inline void write_trace_jsonl(std::ostream& out, const Trace& trace) {
  for (const auto& r : trace) out << to_json(r).dump() << '\n';
}

/// Distance over time; non-tracking frames leave the z column empty.
inline void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "# schema_version: " << kTraceSchemaVersion << '\n';
  out << "t_s,estimated_z_m\n";
  for (const auto& r : trace) {
    out << detail::shortest(r.t_s) << ',';
    if (r.estimated_z_m) out << detail::shortest(*r.estimated_z_m);
    out << '\n';
  }
}

}  // namespace stereo_follow
