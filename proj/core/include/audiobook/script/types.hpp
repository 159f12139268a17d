#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace audiobook {

inline constexpr const char* kNarratorVoice = "narrator";

struct VoiceProfile {
  std::string voice_id;
  double base_pitch = 120.0;  // Hz, 50..400
  double rate = 150.0;        // words per minute, 60..300
  std::int64_t timbre_seed = 0;

  friend bool operator==(const VoiceProfile&, const VoiceProfile&) = default;
};

enum class SegmentKind { kNarration, kDialogue };

struct Segment {
  int index = 0;
  SegmentKind kind = SegmentKind::kNarration;
  std::string voice_id = kNarratorVoice;
  std::string text;
  double sentiment = 0.0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct TrajectoryKey {
  double time_s = 0.0;
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 1.0;

  friend bool operator==(const TrajectoryKey&, const TrajectoryKey&) = default;
};

// Azimuth in degrees, 0 = front, positive = listener's left.
struct SpatialSpec {
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 2.0;
  std::vector<TrajectoryKey> trajectory;
  std::string environment = "room";

  friend bool operator==(const SpatialSpec&, const SpatialSpec&) = default;
};

// A cue is anchored either to a word of a segment or to an absolute time.
// Absolute-time cues still name the segment they were written in.
struct CueAnchor {
  int segment = 0;
  std::optional<int> word;
  std::optional<double> time_s;

  friend bool operator==(const CueAnchor&, const CueAnchor&) = default;
};

enum class CueSource { kAuto, kRetrieved, kProcedural };

struct SoundCue {
  std::string cue_id;
  std::string event;
  CueAnchor anchor;
  SpatialSpec spatial;
  std::optional<double> duration_s;
  CueSource source = CueSource::kAuto;
  std::optional<std::string> asset;
  double confidence = 1.0;

  friend bool operator==(const SoundCue&, const SoundCue&) = default;
};

struct ScriptDoc {
  std::string title;
  std::map<std::string, VoiceProfile> voices;
  std::vector<Segment> segments;
  std::vector<SoundCue> cues;
  std::string environment = "room";

  friend bool operator==(const ScriptDoc&, const ScriptDoc&) = default;
};

const char* to_string(SegmentKind kind);
const char* to_string(CueSource source);
std::optional<CueSource> parse_cue_source(const std::string& s);

}  // namespace audiobook
