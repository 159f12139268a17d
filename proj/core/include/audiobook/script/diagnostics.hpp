#pragma once

#include <string>
#include <vector>

namespace audiobook {

enum class DiagCode {
  kInvalidUtf8,
  kSyntax,
  kUnknownVoice,
  kMalformedCue,
  kOutOfRange,
  kNoSegments,
  kDanglingAnchor,
  kDuplicateCueId,
  kUnknownEvent,
  kInvalidTrajectory,
  kEmptyText,
};

// Line and column are 1-based; 0 means "not tied to a source position".
struct Diagnostic {
  DiagCode code;
  int line = 0;
  int column = 0;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

const char* to_string(DiagCode code);
// "line:col: code: message"
std::string format(const Diagnostic& d);

}  // namespace audiobook
