#pragma once

// Keypoint logs, one JSON object per line.
//
// Canonical record (one per frame and camera, `people` may be empty):
//   {"frame": 12, "t": 1.2, "camera": "left",
//    "people": [{"kp": [[u, v, c] x18], "torso_hsv": [[h, s, v], ...], "id": 0}]}
// "id" is optional ground truth. A keypoint with c == 0 is absent.
//
// Native adapter: each line is a pose-estimator frame document whose people
// carry "pose_keypoints_2d" as 75 numbers (25 BODY-25 triplets). Frame index
// is the line order unless the object has "frame"; t = frame * dt.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stereo_follow/detection.hpp"
#include "stereo_follow/errors.hpp"

namespace stereo_follow {

struct LogFrame {
  std::int64_t frame_index = 0;
  double timestamp_s = 0.0;
  Camera camera = Camera::kLeft;
  std::vector<PersonDetection> people;
  bool has_appearance = false;  // false for native (geometry-only) records
};

namespace detail {

inline Keypoint keypoint_from_triplet(double u, double v, double c) {
  Keypoint k;
  if (c > 0.0) {
    k.u = u;
    k.v = v;
    k.confidence = c;
    k.present = true;
  }
  return k;
}

inline Camera parse_camera(const nlohmann::json& j, std::size_t line) {
  if (!j.is_string()) throw ParseError(line, "\"camera\" must be a string");
  const auto s = j.get<std::string>();
  if (s == "left") return Camera::kLeft;
  if (s == "right") return Camera::kRight;
  throw ParseError(line, "unknown camera \"" + s + "\"");
}

inline double number_at(const nlohmann::json& j, std::size_t line, const char* what) {
  if (!j.is_number()) throw ParseError(line, std::string(what) + " must be numeric");
  return j.get<double>();
}

inline LogFrame parse_canonical(const nlohmann::json& rec, std::size_t line) {
  LogFrame f;
  if (!rec.contains("frame") || !rec["frame"].is_number_integer())
    throw ParseError(line, "missing integer \"frame\"");
  f.frame_index = rec["frame"].get<std::int64_t>();
  if (f.frame_index < 0) throw ParseError(line, "\"frame\" must be >= 0");
  if (!rec.contains("t")) throw ParseError(line, "missing \"t\"");
  f.timestamp_s = number_at(rec["t"], line, "\"t\"");
  if (!rec.contains("camera")) throw ParseError(line, "missing \"camera\"");
  f.camera = parse_camera(rec["camera"], line);
  f.has_appearance = true;
  const auto people = rec.value("people", nlohmann::json::array());
  if (!people.is_array()) throw ParseError(line, "\"people\" must be an array");
  for (const auto& p : people) {
    if (!p.is_object() || !p.contains("kp") || !p["kp"].is_array())
      throw ParseError(line, "person without \"kp\" array");
    const auto& kp = p["kp"];
    if (kp.size() != coco::kNumParts)
      throw SchemaError(line, "expected " + std::to_string(coco::kNumParts) + " keypoints, got " +
                                  std::to_string(kp.size()));
    PersonDetection d;
    d.camera = f.camera;
    d.frame_index = f.frame_index;
    d.timestamp_s = f.timestamp_s;
    for (std::size_t i = 0; i < coco::kNumParts; ++i) {
      const auto& t = kp[i];
      if (!t.is_array() || t.size() != 3) throw SchemaError(line, "keypoint must be [u, v, c]");
      d.keypoints[i] = keypoint_from_triplet(number_at(t[0], line, "u"), number_at(t[1], line, "v"),
                                             number_at(t[2], line, "c"));
    }
    if (p.contains("torso_hsv")) {
      const auto& px = p["torso_hsv"];
      if (!px.is_array()) throw ParseError(line, "\"torso_hsv\" must be an array");
      d.torso_pixels.reserve(px.size());
      for (const auto& t : px) {
        if (!t.is_array() || t.size() != 3) throw SchemaError(line, "pixel must be [h, s, v]");
        HsvPixel hp{number_at(t[0], line, "h"), number_at(t[1], line, "s"),
                    number_at(t[2], line, "v")};
        hp.hue_defined = hp.s > 0.0;
        d.torso_pixels.push_back(hp);
      }
    }
    if (p.contains("id") && p["id"].is_number_integer()) d.person_id = p["id"].get<int>();
    f.people.push_back(std::move(d));
  }
  return f;
}

inline LogFrame parse_native(const nlohmann::json& rec, std::size_t line, std::int64_t ordinal,
                             Camera camera, double dt) {
  LogFrame f;
  f.camera = camera;
  f.frame_index = ordinal;
  if (rec.contains("frame") && rec["frame"].is_number_integer())
    f.frame_index = rec["frame"].get<std::int64_t>();
  f.timestamp_s = static_cast<double>(f.frame_index) * dt;
  f.has_appearance = false;
  const auto& people = rec["people"];
  if (!people.is_array()) throw ParseError(line, "\"people\" must be an array");
  for (const auto& p : people) {
    if (!p.is_object() || !p.contains("pose_keypoints_2d") || !p["pose_keypoints_2d"].is_array())
      throw ParseError(line, "person without \"pose_keypoints_2d\"");
    const auto& flat = p["pose_keypoints_2d"];
    if (flat.size() != 3 * coco::kBody25Parts)
      throw SchemaError(line, "expected " + std::to_string(3 * coco::kBody25Parts) +
                                  " numbers in pose_keypoints_2d, got " + std::to_string(flat.size()));
    PersonDetection d;
    d.camera = camera;
    d.frame_index = f.frame_index;
    d.timestamp_s = f.timestamp_s;
    for (std::size_t i = 0; i < coco::kNumParts; ++i) {
      const std::size_t b = 3 * coco::kFromBody25[i];
      d.keypoints[i] = keypoint_from_triplet(number_at(flat[b], line, "u"),
                                             number_at(flat[b + 1], line, "v"),
                                             number_at(flat[b + 2], line, "c"));
    }
    f.people.push_back(std::move(d));
  }
  return f;
}

}  // namespace detail

/// Parses a whole log. `native_camera` and `native_dt` are used only for
/// native records, which carry neither.
inline std::vector<LogFrame> parse_keypoint_log_frames(std::istream& in,
                                                       Camera native_camera = Camera::kLeft,
                                                       double native_dt = 0.1) {
  std::vector<LogFrame> frames;
  std::string text;
  std::size_t line = 0;
  std::int64_t native_ordinal = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(line, "record must be a JSON object");
    const bool native = rec.contains("people") && rec["people"].is_array() &&
                        !rec["people"].empty() && rec["people"][0].is_object() &&
                        rec["people"][0].contains("pose_keypoints_2d");
    const bool native_empty = !rec.contains("camera") && rec.contains("people");
    if (native || native_empty) {
      frames.push_back(detail::parse_native(rec, line, native_ordinal++, native_camera, native_dt));
    } else {
      frames.push_back(detail::parse_canonical(rec, line));
    }
    if (frames.size() > 1) {
      const auto& a = frames[frames.size() - 2];
      const auto& b = frames.back();
      if (a.camera == b.camera && b.frame_index < a.frame_index)
        throw ParseError(line, "frame index decreases within a stream");
    }
  }
  return frames;
}

inline std::vector<PersonDetection> parse_keypoint_log(std::istream& in,
                                                       Camera native_camera = Camera::kLeft,
                                                       double native_dt = 0.1) {
  std::vector<PersonDetection> out;
  for (auto& f : parse_keypoint_log_frames(in, native_camera, native_dt))
    for (auto& d : f.people) out.push_back(std::move(d));
  return out;
}

inline nlohmann::json to_json(const LogFrame& f) {
  nlohmann::json people = nlohmann::json::array();
  for (const auto& d : f.people) {
    nlohmann::json kp = nlohmann::json::array();
    for (const auto& k : d.keypoints) {
      if (k.present)
        kp.push_back({k.u, k.v, k.confidence});
      else
        kp.push_back({0.0, 0.0, 0.0});
    }
    nlohmann::json px = nlohmann::json::array();
    for (const auto& p : d.torso_pixels) px.push_back({p.h, p.s, p.v});
    nlohmann::json person = {{"kp", std::move(kp)}, {"torso_hsv", std::move(px)}};
    if (d.person_id) person["id"] = *d.person_id;
    people.push_back(std::move(person));
  }
  return {{"frame", f.frame_index},
          {"t", f.timestamp_s},
          {"camera", std::string(to_string(f.camera))},
          {"people", std::move(people)}};
}

inline void write_keypoint_log(std::ostream& out, const std::vector<LogFrame>& frames) {
  for (const auto& f : frames) out << to_json(f).dump() << '\n';
}

}  // namespace stereo_follow
