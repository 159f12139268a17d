#pragma once

#include <condition_variable>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audiobook/tts/synth.hpp"

namespace audiobook {

// An external program that narrates one segment. It receives
//   {"text", "voice_id", "pitch_hz", "rate_wpm", "seed"}
// as JSON on stdin and must print
//   {"wav_path": "...", "words": [{"w", "onset_s", "dur_s"}, ...]}
// on stdout and exit 0. Relative wav paths resolve against working_dir.
struct AdapterConfig {
  std::vector<std::string> command;
  std::filesystem::path working_dir;
  double timeout_s = 120.0;
  bool fallback_to_builtin = true;
  int max_processes = 2;

  bool configured() const { return !command.empty(); }
};

enum class AdapterErrorKind {
  kNotConfigured,
  kLaunchFailed,
  kTimeout,
  kNonzeroExit,
  kSchemaViolation,
  kTimestampViolation,
  kAudioUnreadable,
};

class AdapterError : public std::runtime_error {
 public:
  AdapterError(AdapterErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  AdapterErrorKind kind() const { return kind_; }

 private:
  AdapterErrorKind kind_;
};

const char* to_string(AdapterErrorKind kind);

// Caps how many adapter processes run at once.
class ProcessLimiter {
 public:
  explicit ProcessLimiter(int slots) : free_(slots < 1 ? 1 : slots) {}
  void acquire();
  void release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int free_;
};

struct ProcessOutput {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs argv with `input` on stdin, collecting stdout and stderr.
ProcessOutput run_process(const std::vector<std::string>& argv, const std::string& input,
                          double timeout_s, const std::filesystem::path& working_dir = {});

// Validates a response document against the protocol and the segment text.
// Audio is loaded, mixed to mono and resampled to `rate`.
Narration parse_adapter_response(const nlohmann::json& response, const Segment& seg,
                                 const std::filesystem::path& working_dir, int rate);

nlohmann::json adapter_request(const Segment& seg, const VoiceProfile& voice,
                               const ProsodyParams& prosody);

// Throws AdapterError; never falls back.
Narration external_narrate(const Segment& seg, const VoiceProfile& voice, const AdapterConfig& config,
                           const ProsodyParams& prosody = {}, int rate = kCanonicalRate,
                           ProcessLimiter* limiter = nullptr);

struct NarrationOutcome {
  Narration narration;
  bool external = false;
  std::vector<std::string> warnings;
};

// Uses the adapter when configured. On adapter failure falls back to the
// built-in engine with a warning if the config allows it, else rethrows.
NarrationOutcome narrate(const Segment& seg, const VoiceProfile& voice, const ProsodyParams& prosody,
                         const AdapterConfig* adapter, int rate = kCanonicalRate,
                         ProcessLimiter* limiter = nullptr);

}  // namespace audiobook
