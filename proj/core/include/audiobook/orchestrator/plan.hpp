#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audiobook/mixer/mixer.hpp"
#include "audiobook/orchestrator/project.hpp"
#include "audiobook/script/types.hpp"
#include "audiobook/sfx/sfx.hpp"
#include "audiobook/tts/synth.hpp"

namespace audiobook {

// Silence before the first segment and after the last.
inline constexpr double kLeadInS = 0.5;
inline constexpr double kTailS = 1.0;

struct SegmentPlan {
  int index = 0;
  std::string voice_id;
  double sentiment = 0.0;
  ProsodyParams prosody;
  double transition_score = 0.0;
  double pause_before_s = 0.0;  // 0 for the first segment
  double start_s = 0.0;
  double duration_s = 0.0;
};

struct CuePlan {
  std::string cue_id;
  std::string event;
  Provenance resolution = Provenance::kProcedural;
  std::string asset_id;    // retrieved
  std::uint64_t seed = 0;  // procedural
  double duration_s = 0.0;
  double planned_onset_s = 0.0;
  SpatialSpec spatial;
};

// Everything decided before any audio exists.
struct RenderPlan {
  ScriptDoc doc;  // includes cues found in prose
  std::vector<SegmentPlan> segments;
  std::vector<CuePlan> cues;
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Resolves every cue (retrieval wins over a recipe for auto cues), scores
// transitions, sets prosody from sentiment and lays out the planned
// timeline with the built-in word-duration model. Throws PlanError for a
// cue with neither an asset nor a recipe.
RenderPlan plan(const ScriptDoc& doc, const AssetIndex& index, const ProjectConfig& config);

const char* to_string(Provenance p);
nlohmann::json plan_to_json(const RenderPlan& plan);

}  // namespace audiobook
