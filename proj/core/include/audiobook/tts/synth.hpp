#pragma once

#include <optional>
#include <string>
#include <vector>

#include "audiobook/audio/buffer.hpp"
#include "audiobook/script/types.hpp"

namespace audiobook {

struct ProsodyParams {
  double pitch_scale = 1.0;
  double rate_scale = 1.0;
  double intensity_scale = 1.0;

  friend bool operator==(const ProsodyParams&, const ProsodyParams&) = default;
};

struct TranscriptEntry {
  std::string word;
  double onset_s = 0.0;
  double duration_s = 0.0;
  std::vector<std::string> phonemes;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct TimedTranscript {
  std::vector<TranscriptEntry> entries;

  friend bool operator==(const TimedTranscript&, const TimedTranscript&) = default;
};

struct Narration {
  AudioBuffer audio;  // mono
  TimedTranscript transcript;
};

// pitch * (1 + 0.1 s), rate * (1 + 0.05 s), intensity * (1 + 0.1 |s|).
ProsodyParams apply_prosody(double sentiment, const ProsodyParams& base = {});

// Returns a description of the first broken invariant, or nullopt.
std::optional<std::string> check_transcript(const TimedTranscript& t, double buffer_duration_s);

// Segment length is words * 60 / (wpm * rate_scale). Each word gets a slot
// proportional to its phoneme durations plus a short gap and a longer pause
// after commas and sentence ends; the word sounds for the phoneme part of
// its slot. Audio is a two-formant source-filter voice for vowels and
// sonorants and band-shaped noise for obstruents.
// The word schedule synthesize_segment would produce, without audio.
TimedTranscript plan_transcript(const Segment& seg, const VoiceProfile& voice, const ProsodyParams& prosody = {});
double planned_duration_s(const Segment& seg, const VoiceProfile& voice, const ProsodyParams& prosody = {});

Narration synthesize_segment(const Segment& seg, const VoiceProfile& voice,
                             const ProsodyParams& prosody = {}, int rate = kCanonicalRate);

}  // namespace audiobook
