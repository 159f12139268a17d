#include "audiobook/script/types.hpp"

#include "audiobook/script/diagnostics.hpp"

namespace audiobook {

const char* to_string(SegmentKind kind) {
  return kind == SegmentKind::kDialogue ? "dialogue" : "narration";
}

const char* to_string(CueSource source) {
  switch (source) {
    case CueSource::kRetrieved:
      return "retrieved";
    case CueSource::kProcedural:
      return "procedural";
    case CueSource::kAuto:
      break;
  }
  return "auto";
}

std::optional<CueSource> parse_cue_source(const std::string& s) {
  if (s == "auto") return CueSource::kAuto;
  if (s == "retrieved") return CueSource::kRetrieved;
  if (s == "procedural") return CueSource::kProcedural;
  return std::nullopt;
}

const char* to_string(DiagCode code) {
  switch (code) {
    case DiagCode::kInvalidUtf8:
      return "invalid-utf8";
    case DiagCode::kSyntax:
      return "syntax";
    case DiagCode::kUnknownVoice:
      return "unknown-voice";
    case DiagCode::kMalformedCue:
      return "malformed-cue";
    case DiagCode::kOutOfRange:
      return "out-of-range";
    case DiagCode::kNoSegments:
      return "no-segments";
    case DiagCode::kDanglingAnchor:
      return "dangling-anchor";
    case DiagCode::kDuplicateCueId:
      return "duplicate-cue-id";
    case DiagCode::kUnknownEvent:
      return "unknown-event";
    case DiagCode::kInvalidTrajectory:
      return "invalid-trajectory";
    case DiagCode::kEmptyText:
      return "empty-text";
  }
  return "unknown";
}

std::string format(const Diagnostic& d) {
  return std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + to_string(d.code) +
         ": " + d.message;
}

}  // namespace audiobook
