#pragma once

// Template documents: {"schema_version", "label", "bins"[36], "sample_count",
// "min_saturation"}. Doubles are written in shortest round-trip form, so a
// save/load cycle reproduces every bin bit for bit.

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "stereo_follow/appearance.hpp"
#include "stereo_follow/errors.hpp"

namespace stereo_follow {

inline constexpr int kTemplateSchemaVersion = 1;

inline nlohmann::json to_json(const Template& t) {
  return {{"schema_version", kTemplateSchemaVersion},
          {"label", t.label},
          {"bins", t.histogram.bins()},
          {"sample_count", t.histogram.sample_count()},
          {"min_saturation", t.min_saturation}};
}

inline Template template_from_json(const nlohmann::json& j) {
  try {
    const auto& bins = j.at("bins");
    if (!bins.is_array() || bins.size() != kHueBins)
      throw ParseError(1, "template needs exactly " + std::to_string(kHueBins) + " bins");
    HueHistogram::Bins b{};
    for (std::size_t i = 0; i < kHueBins; ++i) {
      b[i] = bins[i].get<double>();
      if (b[i] < 0.0) throw ParseError(1, "negative histogram bin");
    }
    Template t;
    t.histogram = HueHistogram(b, j.at("sample_count").get<std::size_t>());
    t.label = j.value("label", std::string{});
    t.min_saturation = j.value("min_saturation", kDefaultMinSaturation);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("bad template document: ") + e.what());
  }
}

inline void save_template(const std::string& path, const Template& t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json(t).dump(2) << '\n';
}

inline Template load_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("file not found: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(1, std::string("malformed template JSON: ") + e.what());
  }
  return template_from_json(j);
}

}  // namespace stereo_follow
