#include "audiobook/tts/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>

#include "audiobook/script/text.hpp"
#include "audiobook/tts/phonemes.hpp"
#include "audiobook/util/rng.hpp"

namespace audiobook {
namespace {

constexpr double kWordGap = 0.05;
constexpr double kClausePause = 0.10;
constexpr double kSentencePause = 0.20;
constexpr double kDeclination = 0.12;
constexpr double kJitter = 0.02;
constexpr double kFadeS = 0.004;

enum class Manner { kVowel, kSonorant, kNasal, kFricative, kStop, kAspirate };

struct PhoneSpec {
  Manner manner;
  double f1 = 0, f2 = 0;          // formants (start) for voiced sounds
  double f1_end = 0, f2_end = 0;  // glide targets, 0 = steady
  double noise_hz = 0;            // noise band centre for obstruents
  bool voiced = false;
};

const std::map<std::string, PhoneSpec>& phone_table() {
  using M = Manner;
  static const std::map<std::string, PhoneSpec> t = {
      {"AA", {M::kVowel, 730, 1090}},  {"AE", {M::kVowel, 660, 1720}},
      {"AH", {M::kVowel, 520, 1190}},  {"AO", {M::kVowel, 570, 840}},
      {"AW", {M::kVowel, 660, 1200, 440, 1020}}, {"AY", {M::kVowel, 700, 1220, 300, 2200}},
      {"EH", {M::kVowel, 530, 1840}},  {"ER", {M::kVowel, 490, 1350}},
      {"EY", {M::kVowel, 530, 1840, 300, 2200}}, {"IH", {M::kVowel, 390, 1990}},
      {"IY", {M::kVowel, 270, 2290}},  {"OW", {M::kVowel, 570, 840, 440, 1020}},
      {"OY", {M::kVowel, 570, 840, 300, 2200}},  {"UH", {M::kVowel, 440, 1020}},
      {"UW", {M::kVowel, 300, 870}},
      {"L", {M::kSonorant, 360, 1300}}, {"R", {M::kSonorant, 420, 1300}},
      {"W", {M::kSonorant, 300, 700}},  {"Y", {M::kSonorant, 280, 2200}},
      {"M", {M::kNasal, 280, 1000}},    {"N", {M::kNasal, 280, 1700}},
      {"NG", {M::kNasal, 280, 2000}},
      {"S", {M::kFricative, 0, 0, 0, 0, 6000}},  {"Z", {M::kFricative, 0, 0, 0, 0, 6000, true}},
      {"SH", {M::kFricative, 0, 0, 0, 0, 3000}}, {"ZH", {M::kFricative, 0, 0, 0, 0, 3000, true}},
      {"F", {M::kFricative, 0, 0, 0, 0, 4500}},  {"V", {M::kFricative, 0, 0, 0, 0, 4000, true}},
      {"TH", {M::kFricative, 0, 0, 0, 0, 5000}}, {"DH", {M::kFricative, 0, 0, 0, 0, 4500, true}},
      {"CH", {M::kFricative, 0, 0, 0, 0, 3500}}, {"JH", {M::kFricative, 0, 0, 0, 0, 3000, true}},
      {"HH", {M::kAspirate, 0, 0, 0, 0, 1500}},
      {"P", {M::kStop, 0, 0, 0, 0, 800}},  {"B", {M::kStop, 0, 0, 0, 0, 800, true}},
      {"T", {M::kStop, 0, 0, 0, 0, 4000}}, {"D", {M::kStop, 0, 0, 0, 0, 4000, true}},
      {"K", {M::kStop, 0, 0, 0, 0, 2000}}, {"G", {M::kStop, 0, 0, 0, 0, 2000, true}},
  };
  return t;
}

double target_rms(Manner m) {
  switch (m) {
    case Manner::kVowel:
      return 0.10;
    case Manner::kSonorant:
      return 0.06;
    case Manner::kNasal:
      return 0.05;
    case Manner::kFricative:
      return 0.03;
    case Manner::kStop:
      return 0.04;
    case Manner::kAspirate:
      return 0.02;
  }
  return 0.05;
}

// Two-pole resonator whose centre can move without resetting its state.
class Resonator {
 public:
  void tune(double rate, double hz, double bandwidth_hz) {
    const double r = std::exp(-std::numbers::pi * bandwidth_hz / rate);
    a1_ = 2.0 * r * std::cos(2.0 * std::numbers::pi * hz / rate);
    a2_ = -r * r;
    gain_ = 1.0 - r;
  }
  double process(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0, a2_ = 0, gain_ = 1, y1_ = 0, y2_ = 0;
};

struct WordPlan {
  std::string word;
  std::vector<std::string> phonemes;
  double speech = 0.0;  // sum of base phoneme durations
  double weight = 0.0;  // speech + gap + punctuation pause
};

class Voice {
 public:
  Voice(const VoiceProfile& v, const ProsodyParams& p, int rate, std::uint64_t seed)
      : rate_(rate), rng_(seed), f0_(v.base_pitch * p.pitch_scale) {
    Rng timbre(static_cast<std::uint64_t>(v.timbre_seed) * 0x9E3779B97F4A7C15ull + 1);
    formant_scale_ = 0.92 + 0.16 * timbre.uniform();
    breath_ = 0.02 + 0.04 * timbre.uniform();
  }

  // Renders one phoneme of `n` samples into dst. `progress` is the position
  // within the segment in [0, 1] and drives pitch declination.
  void render(const std::string& phone, std::span<double> dst, double progress, double jitter) {
    const auto it = phone_table().find(phone);
    const PhoneSpec spec = it == phone_table().end() ? phone_table().at("AH") : it->second;
    const std::size_t n = dst.size();
    if (n == 0) return;
    std::vector<double> buf(n, 0.0);
    const double f0 = f0_ * (1.0 - kDeclination * progress) * jitter;
    const bool voiced = spec.manner == Manner::kVowel || spec.manner == Manner::kSonorant ||
                        spec.manner == Manner::kNasal || spec.voiced;
    if (spec.manner == Manner::kVowel || spec.manner == Manner::kSonorant ||
        spec.manner == Manner::kNasal) {
      Resonator r1, r2;
      for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) {
          const double u = spec.f1_end > 0 ? static_cast<double>(i) / static_cast<double>(n) : 0.0;
          const double f1 = (spec.f1 + u * (spec.f1_end - spec.f1)) * formant_scale_;
          const double f2 = (spec.f2 + u * (spec.f2_end - spec.f2)) * formant_scale_;
          r1.tune(rate_, f1, 90.0);
          r2.tune(rate_, f2, 120.0);
        }
        const double src = glottal(f0) + breath_ * (2.0 * rng_.uniform() - 1.0);
        buf[i] = r1.process(src) + 0.6 * r2.process(src);
      }
    } else {
      Resonator band;
      band.tune(rate_, spec.noise_hz, spec.manner == Manner::kAspirate ? 2000.0 : 0.4 * spec.noise_hz);
      std::size_t begin = 0;
      if (spec.manner == Manner::kStop) begin = n * 6 / 10;  // closure, then burst
      for (std::size_t i = begin; i < n; ++i) {
        double s = band.process(2.0 * rng_.uniform() - 1.0);
        if (spec.manner == Manner::kStop) {
          const double k = static_cast<double>(i - begin) / static_cast<double>(n - begin);
          s *= std::exp(-5.0 * k);
        }
        buf[i] = s;
      }
      if (voiced) {
        Resonator low;
        low.tune(rate_, 250.0 * formant_scale_, 100.0);
        for (std::size_t i = 0; i < n; ++i) buf[i] += 0.3 * low.process(glottal(f0));
      }
    }
    double energy = 0.0;
    for (double s : buf) energy += s * s;
    const double rms = std::sqrt(energy / static_cast<double>(n));
    const double gain = rms > 0.0 ? target_rms(spec.manner) / rms : 0.0;
    const auto fade = std::min<std::size_t>(n / 2, static_cast<std::size_t>(kFadeS * rate_));
    for (std::size_t i = 0; i < n; ++i) {
      double env = 1.0;
      if (i < fade) env = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / fade);
      if (n - 1 - i < fade) env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n - 1 - i) / fade));
      dst[i] += gain * env * buf[i];
    }
  }

  double jitter() { return 1.0 + kJitter * (2.0 * rng_.uniform() - 1.0); }

 private:
  double glottal(double f0) {
    phase_ += f0 / rate_;
    phase_ -= std::floor(phase_);
    return 2.0 * phase_ - 1.0;
  }

  int rate_;
  Rng rng_;
  double f0_;
  double formant_scale_ = 1.0;
  double breath_ = 0.03;
  double phase_ = 0.0;
};

}  // namespace

ProsodyParams apply_prosody(double sentiment, const ProsodyParams& base) {
  if (!(sentiment >= -1.0 && sentiment <= 1.0)) {
    throw std::invalid_argument("apply_prosody: sentiment outside [-1, 1]");
  }
  return {base.pitch_scale * (1.0 + 0.1 * sentiment), base.rate_scale * (1.0 + 0.05 * sentiment),
          base.intensity_scale * (1.0 + 0.1 * std::abs(sentiment))};
}

std::optional<std::string> check_transcript(const TimedTranscript& t, double buffer_duration_s) {
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto& e = t.entries[i];
    const std::string at = "entry " + std::to_string(i) + " ('" + e.word + "')";
    if (!std::isfinite(e.onset_s) || !std::isfinite(e.duration_s)) return at + " has non-finite timing";
    if (e.onset_s < 0.0) return at + " starts before 0";
    if (e.duration_s <= 0.0) return at + " has non-positive duration";
    if (i + 1 < t.entries.size()) {
      const auto& next = t.entries[i + 1];
      if (!(next.onset_s > e.onset_s)) return at + " is not followed by a later onset";
      if (e.onset_s + e.duration_s > next.onset_s) return at + " overlaps the next word";
    }
  }
  if (!t.entries.empty()) {
    const auto& last = t.entries.back();
    if (last.onset_s + last.duration_s > buffer_duration_s + 1e-9) return "last word ends after the audio";
  }
  return std::nullopt;
}

namespace {

struct Schedule {
  std::vector<WordPlan> words;
  double total_s = 0.0;
  double scale = 0.0;
};

Schedule schedule(const Segment& seg, const VoiceProfile& voice, const ProsodyParams& prosody) {
  if (!(prosody.pitch_scale > 0 && prosody.rate_scale > 0 && prosody.intensity_scale > 0)) {
    throw std::invalid_argument("synthesize_segment: prosody scales must be positive");
  }
  if (!(voice.rate > 0)) throw std::invalid_argument("synthesize_segment: voice rate must be positive");
  const auto words = tokenize_words(seg.text);
  if (words.empty()) throw std::invalid_argument("synthesize_segment: segment has no words");

  Schedule sc;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    WordPlan wp;
    wp.word = words[i].norm;
    wp.phonemes = phonemize(words[i].norm);
    for (const auto& p : wp.phonemes) wp.speech += phoneme_base_duration(p);
    double pause = kWordGap;
    if (ends_sentence(words[i].raw)) {
      pause += kSentencePause;
    } else if (ends_clause(words[i].raw)) {
      pause += kClausePause;
    }
    wp.weight = wp.speech + pause;
    total_weight += wp.weight;
    sc.words.push_back(std::move(wp));
  }
  sc.total_s = static_cast<double>(words.size()) * 60.0 / (voice.rate * prosody.rate_scale);
  sc.scale = sc.total_s / total_weight;
  return sc;
}

}  // namespace

TimedTranscript plan_transcript(const Segment& seg, const VoiceProfile& voice, const ProsodyParams& prosody) {
  const Schedule sc = schedule(seg, voice, prosody);
  TimedTranscript t;
  double onset = 0.0;
  for (const WordPlan& wp : sc.words) {
    t.entries.push_back({wp.word, onset, wp.speech * sc.scale, wp.phonemes});
    onset += wp.weight * sc.scale;
  }
  return t;
}

double planned_duration_s(const Segment& seg, const VoiceProfile& voice, const ProsodyParams& prosody) {
  return schedule(seg, voice, prosody).total_s;
}

Narration synthesize_segment(const Segment& seg, const VoiceProfile& voice,
                             const ProsodyParams& prosody, int rate) {
  if (rate <= 0) throw std::invalid_argument("synthesize_segment: rate must be positive");
  const Schedule sc = schedule(seg, voice, prosody);
  const auto& plan = sc.words;
  const double total_s = sc.total_s;
  const double scale = sc.scale;

  Narration out;
  const auto frames = static_cast<std::size_t>(std::ceil(total_s * rate));
  std::vector<double> audio(frames, 0.0);
  const std::uint64_t seed = fnv1a(seg.text, static_cast<std::uint64_t>(voice.timbre_seed) ^ 0x5bd1e995ull);
  Voice v(voice, prosody, rate, seed);
  double onset = 0.0;
  for (const WordPlan& wp : plan) {
    TranscriptEntry e;
    e.word = wp.word;
    e.onset_s = onset;
    e.duration_s = wp.speech * scale;
    e.phonemes = wp.phonemes;
    const double jitter = v.jitter();
    double t = onset;
    for (const auto& p : wp.phonemes) {
      const double d = phoneme_base_duration(p) * scale;
      const auto b = static_cast<std::size_t>(std::llround(t * rate));
      const auto en = std::min(frames, static_cast<std::size_t>(std::llround((t + d) * rate)));
      if (en > b) v.render(p, std::span<double>(audio).subspan(b, en - b), t / total_s, jitter);
      t += d;
    }
    out.transcript.entries.push_back(std::move(e));
    onset += wp.weight * scale;
  }
  for (double& s : audio) s *= prosody.intensity_scale;
  out.audio = AudioBuffer::mono(rate, std::move(audio));
  return out;
}

}  // namespace audiobook
