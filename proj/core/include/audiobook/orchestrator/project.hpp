#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "audiobook/mixer/mixer.hpp"
#include "audiobook/spatial/ambisonics.hpp"
#include "audiobook/temporal/dtw.hpp"
#include "audiobook/tts/adapter.hpp"

namespace audiobook {

struct QualityThresholds {
  double alignment_ms = 20.0;
  double loudness_db = 1.0;
  double tmtf_db = 1.0;

  friend bool operator==(const QualityThresholds&, const QualityThresholds&) = default;
};

// Manual nudges applied when the mix plan is first built, for instance
// after a listening review. The correction loop treats them like any other
// deviation.
struct CueAdjustment {
  double onset_offset_ms = 0.0;
  double gain_db = 0.0;

  friend bool operator==(const CueAdjustment&, const CueAdjustment&) = default;
};

struct ProjectConfig {
  int order = 3;
  ListenerProfile listener;
  nlohmann::json environment_overrides = nlohmann::json::object();
  MixTargets targets;
  QualityThresholds thresholds;
  std::uint64_t seed = 0;
  int max_iters = 3;
  DuckOptions duck;
  double w_short = 0.5;  // onset detection weights, see detect_onset
  double w_long = 0.5;
  DtwOptions dtw;
  bool prose_cues = true;
  AdapterConfig tts;
  std::map<std::string, CueAdjustment> adjustments;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

// Paths are absolute after loading.
struct Project {
  std::filesystem::path script;
  std::filesystem::path assets;  // empty: procedural cues only
  std::filesystem::path output;  // empty: caller decides
  ProjectConfig config;
};

const char* to_string(PlaybackMode mode);
// "binaural" or "stereo_speakers".
PlaybackMode parse_playback_mode(const std::string& name);

// Project file (JSON):
//   {"script": "demo.script", "assets": "assets", "output": "out",
//    "config": {"order": 3, "profile": "binaural", "head_radius": 0.0875,
//               "seed": 7, "max_iters": 3, "prose_cues": true,
//               "environments": {<preset overrides>},
//               "targets": {"narration_rms_db", "bed_rms_db", "ceiling_db"},
//               "thresholds": {"alignment_ms", "loudness_db", "tmtf_db"},
//               "duck": {"depth_db", "attack_ms", "release_ms", "threshold_db"},
//               "onset": {"w_short", "w_long"},
//               "dtw": {"metric": "abs", "band": null},
//               "tts": {"command": [...], "timeout_s", "fallback", "max_processes"},
//               "adjustments": {"<cue id>": {"onset_offset_ms", "gain_db"}}}}
// Every config key is optional. Relative paths resolve against `base_dir`;
// tts.command entries that name existing relative files do too.
Project project_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json config_to_json(const ProjectConfig& config);
// Loads a project file, or wraps a .script file in a default project.
Project load_project(const std::filesystem::path& path);

}  // namespace audiobook
