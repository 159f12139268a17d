#include "audiobook/tts/adapter.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "audiobook/audio/resample.hpp"
#include "audiobook/audio/wav.hpp"
#include "audiobook/script/text.hpp"
#include "audiobook/tts/phonemes.hpp"

namespace audiobook {

const char* to_string(AdapterErrorKind kind) {
  switch (kind) {
    case AdapterErrorKind::kNotConfigured:
      return "not-configured";
    case AdapterErrorKind::kLaunchFailed:
      return "launch-failed";
    case AdapterErrorKind::kTimeout:
      return "timeout";
    case AdapterErrorKind::kNonzeroExit:
      return "nonzero-exit";
    case AdapterErrorKind::kSchemaViolation:
      return "schema-violation";
    case AdapterErrorKind::kTimestampViolation:
      return "timestamp-violation";
    case AdapterErrorKind::kAudioUnreadable:
      return "audio-unreadable";
  }
  return "unknown";
}

void ProcessLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return free_ > 0; });
  --free_;
}

void ProcessLimiter::release() {
  {
    std::lock_guard lock(mu_);
    ++free_;
  }
  cv_.notify_one();
}

namespace {

struct Pipe {
  int fd[2] = {-1, -1};
  ~Pipe() {
    for (int f : fd) {
      if (f >= 0) ::close(f);
    }
  }
  void close_end(int i) {
    if (fd[i] >= 0) ::close(fd[i]);
    fd[i] = -1;
  }
};

class SlotGuard {
 public:
  explicit SlotGuard(ProcessLimiter* l) : l_(l) {
    if (l_) l_->acquire();
  }
  ~SlotGuard() {
    if (l_) l_->release();
  }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  ProcessLimiter* l_;
};

}  // namespace

ProcessOutput run_process(const std::vector<std::string>& argv, const std::string& input,
                          double timeout_s, const std::filesystem::path& working_dir) {
  if (argv.empty()) throw AdapterError(AdapterErrorKind::kNotConfigured, "no command given");
  Pipe in, out, err, status;
  if (::pipe(in.fd) != 0 || ::pipe(out.fd) != 0 || ::pipe(err.fd) != 0 || ::pipe(status.fd) != 0) {
    throw AdapterError(AdapterErrorKind::kLaunchFailed, std::string("pipe: ") + std::strerror(errno));
  }
  ::fcntl(status.fd[1], F_SETFD, FD_CLOEXEC);
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const std::string cwd = working_dir.string();

  const pid_t pid = ::fork();
  if (pid < 0) throw AdapterError(AdapterErrorKind::kLaunchFailed, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in.fd[0], STDIN_FILENO);
    ::dup2(out.fd[1], STDOUT_FILENO);
    ::dup2(err.fd[1], STDERR_FILENO);
    for (int f : {in.fd[0], in.fd[1], out.fd[0], out.fd[1], err.fd[0], err.fd[1], status.fd[0]}) ::close(f);
    if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) {
      const int e = errno;
      [[maybe_unused]] auto n = ::write(status.fd[1], &e, sizeof e);
      ::_exit(127);
    }
    ::execvp(args[0], args.data());
    const int e = errno;
    [[maybe_unused]] auto n = ::write(status.fd[1], &e, sizeof e);
    ::_exit(127);
  }
  in.close_end(0);
  out.close_end(1);
  err.close_end(1);
  status.close_end(1);

  int exec_errno = 0;
  if (::read(status.fd[0], &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
    ::waitpid(pid, nullptr, 0);
    throw AdapterError(AdapterErrorKind::kLaunchFailed,
                       "cannot run '" + argv[0] + "': " + std::strerror(exec_errno));
  }

  ::signal(SIGPIPE, SIG_IGN);
  ProcessOutput result;
  std::size_t written = 0;
  if (input.empty()) in.close_end(1);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  char buf[65536];
  while (out.fd[0] >= 0 || err.fd[0] >= 0) {
    std::vector<pollfd> fds;
    if (in.fd[1] >= 0) fds.push_back({in.fd[1], POLLOUT, 0});
    if (out.fd[0] >= 0) fds.push_back({out.fd[0], POLLIN, 0});
    if (err.fd[0] >= 0) fds.push_back({err.fd[0], POLLIN, 0});
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
    if (left <= 0) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      throw AdapterError(AdapterErrorKind::kTimeout,
                         "'" + argv[0] + "' did not finish within " + std::to_string(timeout_s) + " s");
    }
    const int rc = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(left, 1000)));
    if (rc < 0 && errno != EINTR) break;
    for (const auto& p : fds) {
      if (p.revents == 0) continue;
      if (p.fd == in.fd[1]) {
        const ssize_t n = ::write(in.fd[1], input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 || written == input.size()) in.close_end(1);
      } else {
        const ssize_t n = ::read(p.fd, buf, sizeof buf);
        std::string& sink = p.fd == out.fd[0] ? result.out : result.err;
        if (n > 0) {
          sink.append(buf, static_cast<std::size_t>(n));
        } else if (p.fd == out.fd[0]) {
          out.close_end(0);
        } else {
          err.close_end(0);
        }
      }
    }
  }
  in.close_end(1);
  int wstatus = 0;
  ::waitpid(pid, &wstatus, 0);
  result.exit_code = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : 128 + WTERMSIG(wstatus);
  return result;
}

nlohmann::json adapter_request(const Segment& seg, const VoiceProfile& voice,
                               const ProsodyParams& prosody) {
  return {{"text", seg.text},
          {"voice_id", voice.voice_id},
          {"pitch_hz", voice.base_pitch * prosody.pitch_scale},
          {"rate_wpm", voice.rate * prosody.rate_scale},
          {"seed", voice.timbre_seed}};
}

Narration parse_adapter_response(const nlohmann::json& response, const Segment& seg,
                                 const std::filesystem::path& working_dir, int rate) {
  const auto schema = [](const std::string& msg) {
    return AdapterError(AdapterErrorKind::kSchemaViolation, msg);
  };
  if (!response.is_object()) throw schema("response is not a JSON object");
  if (!response.contains("wav_path") || !response["wav_path"].is_string()) {
    throw schema("response lacks a string 'wav_path'");
  }
  if (!response.contains("words") || !response["words"].is_array()) {
    throw schema("response lacks a 'words' array");
  }
  const auto expected = tokenize_words(seg.text);
  Narration n;
  for (const auto& w : response["words"]) {
    if (!w.is_object() || !w.contains("w") || !w["w"].is_string() || !w.contains("onset_s") ||
        !w["onset_s"].is_number() || !w.contains("dur_s") || !w["dur_s"].is_number()) {
      throw schema("each word needs string 'w' and numeric 'onset_s' and 'dur_s'");
    }
    TranscriptEntry e;
    e.word = normalize_word(w["w"].get<std::string>());
    e.onset_s = w["onset_s"].get<double>();
    e.duration_s = w["dur_s"].get<double>();
    if (!e.word.empty()) e.phonemes = phonemize(e.word);
    n.transcript.entries.push_back(std::move(e));
  }
  if (n.transcript.entries.size() != expected.size()) {
    throw schema("response has " + std::to_string(n.transcript.entries.size()) +
                 " words, segment text has " + std::to_string(expected.size()));
  }
  std::filesystem::path wav = response["wav_path"].get<std::string>();
  if (wav.is_relative()) wav = working_dir / wav;
  AudioBuffer audio;
  try {
    audio = read_wav(wav);
  } catch (const WavError& e) {
    throw AdapterError(AdapterErrorKind::kAudioUnreadable, wav.string() + ": " + e.what());
  }
  audio = resample(mixdown_mono(audio), rate);
  if (const auto problem = check_transcript(n.transcript, audio.duration_s())) {
    throw AdapterError(AdapterErrorKind::kTimestampViolation, *problem);
  }
  n.audio = std::move(audio);
  return n;
}

Narration external_narrate(const Segment& seg, const VoiceProfile& voice, const AdapterConfig& config,
                           const ProsodyParams& prosody, int rate, ProcessLimiter* limiter) {
  if (!config.configured()) {
    throw AdapterError(AdapterErrorKind::kNotConfigured, "narrator adapter command is not configured");
  }
  ProcessOutput po;
  {
    SlotGuard slot(limiter);
    po = run_process(config.command, adapter_request(seg, voice, prosody).dump() + "\n",
                     config.timeout_s, config.working_dir);
  }
  if (po.exit_code != 0) {
    std::string tail = po.err.size() > 400 ? po.err.substr(po.err.size() - 400) : po.err;
    throw AdapterError(AdapterErrorKind::kNonzeroExit,
                       "adapter exited with status " + std::to_string(po.exit_code) +
                           (tail.empty() ? "" : ": " + tail));
  }
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(po.out);
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(AdapterErrorKind::kSchemaViolation, std::string("stdout is not JSON: ") + e.what());
  }
  return parse_adapter_response(response, seg, config.working_dir, rate);
}

NarrationOutcome narrate(const Segment& seg, const VoiceProfile& voice, const ProsodyParams& prosody,
                         const AdapterConfig* adapter, int rate, ProcessLimiter* limiter) {
  NarrationOutcome o;
  if (adapter && adapter->configured()) {
    try {
      o.narration = external_narrate(seg, voice, *adapter, prosody, rate, limiter);
      o.external = true;
      return o;
    } catch (const AdapterError& e) {
      if (!adapter->fallback_to_builtin) throw;
      o.warnings.push_back("segment " + std::to_string(seg.index) + ": narrator adapter failed (" +
                           to_string(e.kind()) + ": " + e.what() + "); used built-in voice");
    }
  }
  o.narration = synthesize_segment(seg, voice, prosody, rate);
  return o;
}

}  // namespace audiobook
