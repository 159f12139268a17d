#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audiobook/audio/buffer.hpp"
#include "audiobook/mixer/mixer.hpp"
#include "audiobook/orchestrator/messages.hpp"
#include "audiobook/orchestrator/plan.hpp"
#include "audiobook/orchestrator/project.hpp"
#include "audiobook/orchestrator/quality.hpp"
#include "audiobook/temporal/anchor.hpp"

namespace audiobook {

// A failure in one pipeline stage ("parse", "validate", "plan", "narrate",
// "anchor", "sfx", "spatial", "mix", "write").
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RenderOptions {
  int threads = 1;
};

struct RenderOutcome {
  RenderPlan plan;
  MixPlan mix;  // after the last correction
  AudioBuffer master;
  QualityReport report;
  std::vector<AgentMessage> messages;

  // Intermediate products, kept for inspection.
  AudioBuffer narration;  // mono, before mastering
  std::vector<double> segment_starts;  // realized timeline
  std::vector<bool> external_segments;
  std::vector<CueOnset> anchors;
  std::map<std::string, AudioBuffer> stems;  // spatialized cues, unity gain
  std::map<std::string, double> stem_onsets;  // detect_onset per stem
};

nlohmann::json mix_plan_to_json(const MixPlan& mix);

// Narrate (parallel per segment), anchor, resolve and spatialize cues
// (parallel per cue), then mix, master and measure under the correction
// loop. Output bytes depend only on the inputs, never on `threads`.
RenderOutcome render_document(const ScriptDoc& doc, const AssetIndex& index, const std::filesystem::path& asset_root,
                              const ProjectConfig& config, const RenderOptions& options = {});

// Reads, parses and validates the script, indexes the asset directory and
// renders. Errors are StageError.
RenderOutcome render_project(const Project& project, const RenderOptions& options = {});

// master.wav (32-bit float), report.json, messages.jsonl and plan.json.
void write_outputs(const RenderOutcome& outcome, const std::filesystem::path& dir);

}  // namespace audiobook
