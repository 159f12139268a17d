#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "audiobook/audio/buffer.hpp"
#include "audiobook/script/types.hpp"
#include "audiobook/temporal/dtw.hpp"
#include "audiobook/tts/synth.hpp"

namespace audiobook {

inline constexpr double kEnvelopeHopS = 0.025;

// Where one segment landed on the master timeline.
struct SegmentTiming {
  std::size_t segment = 0;
  double start_s = 0.0;
  // Word schedule of the built-in synthesizer for this segment.
  TimedTranscript planned;
  // Energy envelopes of the planned and realized narration. Both are set
  // only when the realized audio came from an external engine.
  std::optional<FeatureSeries> planned_envelope;
  std::optional<FeatureSeries> realized_envelope;
};

struct CueOnset {
  std::string cue_id;
  double onset_s = 0.0;
  double planned_onset_s = 0.0;  // before any warp
  double dtw_cost = 0.0;         // cost of the warp used, 0 if none

  friend bool operator==(const CueOnset&, const CueOnset&) = default;
};

// Word-anchored cues land at the end of their word. For externally voiced
// segments the planned time is mapped through the DTW path between the
// planned and realized envelopes. Absolute-time cues pass through. Output
// keeps the order of `cues`. Throws std::out_of_range on anchors outside
// the transcripts.
std::vector<CueOnset> anchor_cues(const std::vector<SegmentTiming>& timings, const std::vector<SoundCue>& cues,
                                  const DtwOptions& options = {});

// Perceptual onset of a cue stem in seconds: the first time the multiscale
// envelope w_s F_s + w_l F_l (short 50 ms and long 400 ms log-energy
// windows, peak-normalized) rises above threshold_db, interpolated between
// envelope steps.
double detect_onset(const AudioBuffer& stem, double w_s = 0.5, double w_l = 0.5, double threshold_db = -30.0);

}  // namespace audiobook
