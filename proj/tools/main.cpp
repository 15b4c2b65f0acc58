// stereo-follow: run follow scenarios, replay recorded keypoint logs and
// build appearance templates.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stereo_follow/stereo_follow.hpp"

namespace fs = std::filesystem;
using namespace stereo_follow;

namespace {

constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;

std::vector<Override> parse_overrides(const std::vector<std::string>& sets) {
  std::vector<Override> out;
  for (const auto& s : sets) out.push_back(parse_override(s));
  return out;
}

void write_outputs(const fs::path& dir, const Trace& trace, const Metrics& metrics) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "trace.jsonl");
    write_trace_jsonl(out, trace);
  }
  {
    std::ofstream out(dir / "trace.csv");
    write_trace_csv(out, trace);
  }
  std::ofstream out(dir / "metrics.json");
  out << to_json(metrics).dump(2) << '\n';
}

std::vector<LogFrame> read_log(const std::string& path, Camera cam, double dt) {
  std::ifstream in(path);
  if (!in) throw Error("file not found: " + path);
  return parse_keypoint_log_frames(in, cam, dt);
}

struct RunArgs {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool export_logs = false;
};

int cmd_run(const RunArgs& a) {
  auto overrides = parse_overrides(a.sets);
  if (a.seed) overrides.emplace_back("seed", std::to_string(*a.seed));
  const Scenario s = load_scenario(a.scenario, overrides);
  const auto res = run_scenario(s, a.export_logs);
  const fs::path dir(a.out);
  write_outputs(dir, res.trace, res.metrics);
  if (a.export_logs) {
    std::ofstream l(dir / "left.jsonl");
    write_keypoint_log(l, res.left_log);
    std::ofstream r(dir / "right.jsonl");
    write_keypoint_log(r, res.right_log);
    if (res.tmpl) save_template((dir / "template.json").string(), *res.tmpl);
  }
  std::cout << s.name << ": " << res.metrics.frames_tracking << "/" << res.metrics.frames_total
            << " frames tracking, " << res.metrics.occlusion_episodes << " occlusion episodes\n";
  return 0;
}

struct ReplayArgs {
  std::string left;
  std::string right;
  std::string template_path;
  std::string scenario;
  std::string out = "out";
  double baseline_m = 0.094;
  std::string resolution = "640x480";
  double hfov_deg = 54.0;
  double dt = 0.1;
  bool assume_single_person = false;
  std::vector<std::string> sets;
};

PixelSize parse_resolution(const std::string& s) {
  int w = 0;
  int h = 0;
  char x = 0;
  if (std::sscanf(s.c_str(), "%d%c%d", &w, &x, &h) != 3 || (x != 'x' && x != 'X'))
    throw ParameterError("resolution must look like 640x480");
  return {w, h};
}

int cmd_replay(const ReplayArgs& a) {
  ReplayOptions opt;
  opt.default_dt = a.dt;
  std::optional<StereoRig> rig;
  if (!a.scenario.empty()) {
    const Scenario s = load_scenario(a.scenario, parse_overrides(a.sets));
    rig = s.rig.make();
    opt.tracker = s.tracker;
    opt.controller = s.controller;
    opt.default_dt = s.dt;
    if (s.target()) opt.target_id = s.target_id;
  } else {
    rig = StereoRig::from_fov(a.baseline_m, parse_resolution(a.resolution), a.hfov_deg);
  }
  opt.tracker.assume_single_person = a.assume_single_person;

  std::optional<Template> tmpl;
  if (!a.template_path.empty()) {
    tmpl = load_template(a.template_path);
  } else if (!a.assume_single_person) {
    throw ParameterError("replay needs --template unless --assume-single-person is given");
  }

  const auto left = read_log(a.left, Camera::kLeft, opt.default_dt);
  const auto right = read_log(a.right, Camera::kRight, opt.default_dt);
  const auto trace = replay(left, right, *rig, tmpl, opt);
  write_outputs(a.out, trace, compute_metrics(trace, opt.default_dt, opt.target_id));
  std::cout << "replayed " << trace.size() << " frames\n";
  return 0;
}

struct TemplateArgs {
  std::string input;
  std::string label = "target";
  std::string out = "template.json";
  double min_saturation = kDefaultMinSaturation;
};

// Pixel documents look like {"hsv": [[h, s, v], ...]} or {"rgb": [[r, g, b], ...]}
// (channels in [0, 1]); anything else is read as a keypoint log and the first
// detection with a usable torso is taken.
std::optional<std::vector<HsvPixel>> read_pixel_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("file not found: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error&) {
    return std::nullopt;
  }
  if (!j.is_object() || !(j.contains("hsv") || j.contains("rgb"))) return std::nullopt;
  std::vector<HsvPixel> px;
  if (j.contains("hsv")) {
    for (const auto& t : j["hsv"]) {
      HsvPixel p{t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
      p.hue_defined = p.s > 0.0;
      px.push_back(p);
    }
  } else {
    for (const auto& t : j["rgb"])
      px.push_back(rgb_to_hsv({t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()}));
  }
  return px;
}

int cmd_make_template(const TemplateArgs& a) {
  std::vector<HsvPixel> pixels;
  if (auto doc = read_pixel_document(a.input)) {
    pixels = std::move(*doc);
  } else {
    std::ifstream in(a.input);
    bool found = false;
    for (const auto& d : parse_keypoint_log(in)) {
      if (!has_torso(d) || d.torso_pixels.empty()) continue;
      if (build_histogram(d.torso_pixels, a.min_saturation).empty()) continue;
      pixels = d.torso_pixels;
      found = true;
      break;
    }
    if (!found) throw NoAppearanceDataError("no detection with a usable torso in " + a.input);
  }
  const Template t = make_template(pixels, a.label, a.min_saturation);
  save_template(a.out, t);
  std::cout << "template '" << t.label << "': " << t.histogram.sample_count()
            << " pixels, peak hue bin " << t.histogram.argmax() << "\n";
  return 0;
}

int cmd_validate(const std::string& path, const std::vector<std::string>& sets) {
  const Scenario s = load_scenario(path, parse_overrides(sets));
  std::cout << s.name << ": ok (" << s.persons.size() << " persons, " << s.frame_count()
            << " frames)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-camera person following: simulation, replay and templates"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write trace/metrics");
  run_cmd->add_option("scenario", run.scenario, "Scenario file")->required();
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
  run_cmd->add_option("--set", run.sets, "Override key=value (dotted path)");
  run_cmd->add_flag("--export-logs", run.export_logs,
                    "Also write left/right keypoint logs and the template");

  ReplayArgs rp;
  auto* replay_cmd = app.add_subcommand("replay", "Replay left/right keypoint logs");
  replay_cmd->add_option("left", rp.left, "Left camera log")->required();
  replay_cmd->add_option("right", rp.right, "Right camera log")->required();
  replay_cmd->add_option("--template", rp.template_path, "Template JSON");
  replay_cmd->add_option("--scenario", rp.scenario, "Take rig/tracker/controller from a scenario");
  replay_cmd->add_option("--baseline-m", rp.baseline_m, "Baseline in meters");
  replay_cmd->add_option("--resolution", rp.resolution, "Image size WxH");
  replay_cmd->add_option("--hfov-deg", rp.hfov_deg, "Horizontal field of view");
  replay_cmd->add_option("--dt", rp.dt, "Frame period for logs without timestamps");
  replay_cmd->add_option("--out", rp.out, "Output directory");
  replay_cmd->add_option("--set", rp.sets, "Override key=value in --scenario");
  replay_cmd->add_flag("--assume-single-person", rp.assume_single_person,
                       "Skip the appearance gate when a camera sees exactly one person");

  TemplateArgs tp;
  auto* tmpl_cmd = app.add_subcommand("make-template", "Build a hue template");
  tmpl_cmd->add_option("input", tp.input, "Pixel document or keypoint log")->required();
  tmpl_cmd->add_option("--label", tp.label, "Template label");
  tmpl_cmd->add_option("--out", tp.out, "Output template path");
  tmpl_cmd->add_option("--min-saturation", tp.min_saturation, "Saturation floor");

  std::string validate_path;
  std::vector<std::string> validate_sets;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", validate_path, "Scenario file")->required();
  validate_cmd->add_option("--set", validate_sets, "Override key=value (dotted path)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*replay_cmd) return cmd_replay(rp);
    if (*tmpl_cmd) return cmd_make_template(tp);
    if (*validate_cmd) return cmd_validate(validate_path, validate_sets);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const AlignmentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NoAppearanceDataError& e) {
    std::cerr << "error: no-appearance-data: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
