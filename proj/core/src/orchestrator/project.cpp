#include "audiobook/orchestrator/project.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace audiobook {
namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

const char* to_string(PlaybackMode mode) {
  return mode == PlaybackMode::kBinaural ? "binaural" : "stereo_speakers";
}

PlaybackMode parse_playback_mode(const std::string& name) {
  if (name == "binaural") return PlaybackMode::kBinaural;
  if (name == "stereo_speakers") return PlaybackMode::kStereoSpeakers;
  throw std::invalid_argument("unknown playback profile '" + name + "' (binaural, stereo_speakers)");
}

void ProjectConfig::validate() const {
  if (order < 1 || order > kMaxAmbisonicOrder) {
    throw std::invalid_argument("order must be 1.." + std::to_string(kMaxAmbisonicOrder));
  }
  if (!(listener.head_radius >= 0.06 && listener.head_radius <= 0.12)) {
    throw std::invalid_argument("head_radius must be within 0.06..0.12 m");
  }
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(thresholds.alignment_ms > 0 && thresholds.loudness_db > 0 && thresholds.tmtf_db > 0)) {
    throw std::invalid_argument("thresholds must be positive");
  }
  if (!(targets.ceiling_db <= 0.0)) throw std::invalid_argument("ceiling_db must be <= 0");
  if (!(w_short >= 0 && w_long >= 0) || std::abs(w_short + w_long - 1.0) > 1e-12) {
    throw std::invalid_argument("onset weights must be non-negative and sum to 1");
  }
  if (!(duck.depth_db <= 0 && duck.attack_ms > 0 && duck.release_ms > 0)) {
    throw std::invalid_argument("duck settings out of range");
  }
  if (tts.configured() && !(tts.timeout_s > 0)) throw std::invalid_argument("tts.timeout_s must be positive");
}

Project project_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw std::invalid_argument("project must be a JSON object");
  if (!j.contains("script")) throw std::invalid_argument("project needs a \"script\" path");
  Project p;
  try {
    p.script = resolve(base_dir, j.at("script").get<std::string>());
    if (j.contains("assets") && !j.at("assets").is_null()) p.assets = resolve(base_dir, j.at("assets").get<std::string>());
    if (j.contains("output") && !j.at("output").is_null()) p.output = resolve(base_dir, j.at("output").get<std::string>());
    const nlohmann::json c = j.value("config", nlohmann::json::object());
    ProjectConfig& cfg = p.config;
    read(c, "order", cfg.order);
    if (c.contains("profile")) cfg.listener.mode = parse_playback_mode(c.at("profile").get<std::string>());
    read(c, "head_radius", cfg.listener.head_radius);
    read(c, "seed", cfg.seed);
    read(c, "max_iters", cfg.max_iters);
    read(c, "prose_cues", cfg.prose_cues);
    if (c.contains("environments")) cfg.environment_overrides = c.at("environments");
    if (c.contains("targets")) {
      const auto& t = c.at("targets");
      read(t, "narration_rms_db", cfg.targets.narration_rms_db);
      read(t, "bed_rms_db", cfg.targets.bed_rms_db);
      read(t, "ceiling_db", cfg.targets.ceiling_db);
    }
    if (c.contains("thresholds")) {
      const auto& t = c.at("thresholds");
      read(t, "alignment_ms", cfg.thresholds.alignment_ms);
      read(t, "loudness_db", cfg.thresholds.loudness_db);
      read(t, "tmtf_db", cfg.thresholds.tmtf_db);
    }
    if (c.contains("duck")) {
      const auto& d = c.at("duck");
      read(d, "depth_db", cfg.duck.depth_db);
      read(d, "attack_ms", cfg.duck.attack_ms);
      read(d, "release_ms", cfg.duck.release_ms);
      read(d, "threshold_db", cfg.duck.threshold_db);
    }
    if (c.contains("onset")) {
      read(c.at("onset"), "w_short", cfg.w_short);
      read(c.at("onset"), "w_long", cfg.w_long);
    }
    if (c.contains("dtw")) {
      const auto& d = c.at("dtw");
      if (d.contains("metric")) cfg.dtw.metric = parse_dtw_metric(d.at("metric").get<std::string>());
      if (d.contains("band") && !d.at("band").is_null()) cfg.dtw.band = d.at("band").get<std::size_t>();
    }
    if (c.contains("tts")) {
      const auto& t = c.at("tts");
      std::vector<std::string> command;
      read(t, "command", command);
      // Only a program given as a relative path is resolved; arguments pass
      // through untouched.
      if (!command.empty() && command[0].find('/') != std::string::npos &&
          std::filesystem::path(command[0]).is_relative()) {
        command[0] = resolve(base_dir, command[0]).string();
      }
      cfg.tts.command = std::move(command);
      cfg.tts.working_dir = base_dir;
      read(t, "timeout_s", cfg.tts.timeout_s);
      read(t, "fallback", cfg.tts.fallback_to_builtin);
      read(t, "max_processes", cfg.tts.max_processes);
    }
    if (c.contains("adjustments")) {
      for (const auto& [id, a] : c.at("adjustments").items()) {
        CueAdjustment adj;
        read(a, "onset_offset_ms", adj.onset_offset_ms);
        read(a, "gain_db", adj.gain_db);
        cfg.adjustments[id] = adj;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("project: ") + e.what());
  }
  p.config.validate();
  return p;
}

nlohmann::json config_to_json(const ProjectConfig& c) {
  nlohmann::json adjustments = nlohmann::json::object();
  for (const auto& [id, a] : c.adjustments) adjustments[id] = {{"onset_offset_ms", a.onset_offset_ms}, {"gain_db", a.gain_db}};
  return {
      {"order", c.order},
      {"profile", to_string(c.listener.mode)},
      {"head_radius", c.listener.head_radius},
      {"seed", c.seed},
      {"max_iters", c.max_iters},
      {"prose_cues", c.prose_cues},
      {"environments", c.environment_overrides},
      {"targets",
       {{"narration_rms_db", c.targets.narration_rms_db},
        {"bed_rms_db", c.targets.bed_rms_db},
        {"ceiling_db", c.targets.ceiling_db}}},
      {"thresholds",
       {{"alignment_ms", c.thresholds.alignment_ms},
        {"loudness_db", c.thresholds.loudness_db},
        {"tmtf_db", c.thresholds.tmtf_db}}},
      {"duck",
       {{"depth_db", c.duck.depth_db},
        {"attack_ms", c.duck.attack_ms},
        {"release_ms", c.duck.release_ms},
        {"threshold_db", c.duck.threshold_db}}},
      {"onset", {{"w_short", c.w_short}, {"w_long", c.w_long}}},
      {"dtw",
       {{"metric", c.dtw.metric == DtwMetric::kAbs ? "abs" : "squared"},
        {"band", c.dtw.band ? nlohmann::json(*c.dtw.band) : nlohmann::json(nullptr)}}},
      {"tts", {{"command", c.tts.command}, {"timeout_s", c.tts.timeout_s}, {"fallback", c.tts.fallback_to_builtin},
               {"max_processes", c.tts.max_processes}}},
      {"adjustments", adjustments},
  };
}

Project load_project(const std::filesystem::path& path) {
  const auto abs = std::filesystem::absolute(path).lexically_normal();
  std::ifstream in(abs, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + abs.string());
  if (abs.extension() == ".script") {
    Project p;
    p.script = abs;
    return p;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(abs.string() + ": " + e.what());
  }
  return project_from_json(j, abs.parent_path());
}

}  // namespace audiobook
