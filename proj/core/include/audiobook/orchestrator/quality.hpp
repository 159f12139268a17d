#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audiobook/mixer/mixer.hpp"
#include "audiobook/orchestrator/project.hpp"

namespace audiobook {

struct CueAlignment {
  std::string cue_id;
  double planned_onset_s = 0.0;   // anchor target on the realized timeline
  double realized_onset_s = 0.0;  // layer placement + detected stem onset
  double alignment_error_ms = 0.0;  // realized - planned
  bool pass = true;
};

// Layer level against the narration, both before mastering. Excess is how
// far the ratio sits above bed_rms_db - narration_rms_db; a quieter layer
// is never an error.
struct LayerLoudness {
  std::string cue_id;
  double rms_db = 0.0;
  double ratio_db = 0.0;
  double excess_db = 0.0;
  bool pass = true;
};

// Amplitude-modulation probe sent through the mastering chain.
struct TmtfCheck {
  std::string name;
  double f_m = 0.0;
  double f_c = 0.0;
  double depth = 0.0;
  double expected_db = 0.0;
  double measured_db = 0.0;
  bool pass = true;
};

struct IterationMetrics {
  int iteration = 0;
  double max_alignment_error_ms = 0.0;  // absolute
  double max_loudness_excess_db = 0.0;  // clamped at 0
  bool pass = false;
};

struct QualityReport {
  std::vector<CueAlignment> cues;
  std::vector<LayerLoudness> layers;
  double narration_rms_db = 0.0;  // post-master narration solo path
  bool narration_pass = true;
  double bed_rms_db = kSilenceFloorDb;  // loudest layer, pre-master
  double ratio_db = 0.0;                // bed_rms_db - pre-master narration
  double peak_db = kSilenceFloorDb;     // final master
  double dtw_cost = 0.0;                // sum over externally voiced segments
  std::vector<TmtfCheck> tmtf_checks;
  int iterations_run = 0;
  std::vector<IterationMetrics> history;
  std::vector<std::string> warnings;
  bool pass = false;

  // Recomputes every pass flag from the measurements and thresholds.
  void evaluate(const ProjectConfig& config);
};

nlohmann::json report_to_json(const QualityReport& report);
QualityReport report_from_json(const nlohmann::json& j);

struct Correction {
  std::string rule;  // "shift_onset" or "lower_gain"
  std::string cue_id;
  double amount = 0.0;  // ms for shifts (signed), dB for gain (negative)
};

struct CritiqueResult {
  MixPlan plan;
  bool done = false;
  std::vector<Correction> corrections;
};

// (a) a cue off by more than the alignment threshold moves by -error;
// (b) a layer more than the loudness threshold above the bed target loses
// its excess from every automation key; (c) if everything passes the plan
// is returned unchanged with done = true.
CritiqueResult critique_and_correct(const QualityReport& report, const MixPlan& plan, const ProjectConfig& config);

nlohmann::json corrections_to_json(const std::vector<Correction>& corrections);

}  // namespace audiobook
