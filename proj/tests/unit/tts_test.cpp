#include <audiobook/audio/wav.hpp>
#include <audiobook/script/text.hpp>
#include <audiobook/tts/adapter.hpp>
#include <audiobook/tts/phonemes.hpp>
#include <audiobook/tts/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace audiobook;

namespace {

Segment segment(const std::string& text) {
  Segment s;
  s.text = text;
  return s;
}

VoiceProfile voice(double pitch = 120.0, double rate = 150.0, std::int64_t seed = 1) {
  VoiceProfile v;
  v.voice_id = "v";
  v.base_pitch = pitch;
  v.rate = rate;
  v.timbre_seed = seed;
  return v;
}

// Fundamental from the strongest normalized autocorrelation lag in the
// 60..400 Hz range, over the loudest half second.
double autocorr_f0(const AudioBuffer& b) {
  const auto x = b.channel(0);
  const std::size_t win = static_cast<std::size_t>(b.sample_rate() / 2);
  std::size_t best_start = 0;
  double best_e = -1.0;
  for (std::size_t s = 0; s + win < x.size(); s += win / 4) {
    double e = 0.0;
    for (std::size_t i = s; i < s + win; ++i) e += x[i] * x[i];
    if (e > best_e) {
      best_e = e;
      best_start = s;
    }
  }
  const int lo = b.sample_rate() / 400, hi = b.sample_rate() / 60;
  int best_lag = lo;
  double best_r = -1e300;
  for (int lag = lo; lag <= hi; ++lag) {
    double r = 0.0;
    for (std::size_t i = best_start; i + static_cast<std::size_t>(lag) < best_start + win; ++i) r += x[i] * x[i + static_cast<std::size_t>(lag)];
    r /= static_cast<double>(win - static_cast<std::size_t>(lag));
    if (r > best_r) {
      best_r = r;
      best_lag = lag;
    }
  }
  return static_cast<double>(b.sample_rate()) / best_lag;
}

const std::string kThirtyWords =
    "the keeper walked along the shore and watched the boats come in one by one while the light "
    "above them turned slowly through the long and quiet night until dawn";

}  // namespace

TEST(Phonemize, LexiconHit) {
  EXPECT_EQ(phonemize("cat"), (std::vector<std::string>{"K", "AE", "T"}));
  EXPECT_EQ(phonemize("Cat,"), phonemize("cat"));
}

TEST(Phonemize, FallbackRules) {
  EXPECT_EQ(PronouncingLexicon::builtin().find("blorp"), nullptr);
  EXPECT_EQ(phonemize("blorp"), (std::vector<std::string>{"B", "L", "AO", "R", "P"}));
}

TEST(Phonemize, EmptyAfterNormalizationIsRejected) {
  EXPECT_THROW(phonemize("\xE2\x80\x94"), std::invalid_argument);
  EXPECT_THROW(phonemize(""), std::invalid_argument);
}

TEST(Phonemize, LexiconFileFormat) {
  const auto lex = PronouncingLexicon::parse(";;; comment\nHELLO  HH AH0 L OW1\nHELLO(2)  HH EH0 L OW1\n");
  ASSERT_EQ(lex.size(), 1u);
  EXPECT_EQ(*lex.find("hello"), (std::vector<std::string>{"HH", "AH", "L", "OW"}));
}

TEST(Prosody, Identity) { EXPECT_EQ(apply_prosody(0.0), ProsodyParams{}); }

TEST(Prosody, Extremes) {
  const ProsodyParams up = apply_prosody(1.0);
  EXPECT_DOUBLE_EQ(up.pitch_scale, 1.1);
  EXPECT_DOUBLE_EQ(up.rate_scale, 1.05);
  EXPECT_DOUBLE_EQ(up.intensity_scale, 1.1);
  const ProsodyParams down = apply_prosody(-1.0);
  EXPECT_DOUBLE_EQ(down.pitch_scale, 0.9);
  EXPECT_DOUBLE_EQ(down.rate_scale, 0.95);
  EXPECT_DOUBLE_EQ(down.intensity_scale, 1.1);
}

TEST(Prosody, MonotoneInSentiment) {
  double prev_pitch = 0.0, prev_rate = 0.0;
  for (double s = -1.0; s <= 1.0 + 1e-12; s += 0.1) {
    const ProsodyParams p = apply_prosody(s);
    EXPECT_GT(p.pitch_scale, prev_pitch);
    EXPECT_GT(p.rate_scale, prev_rate);
    prev_pitch = p.pitch_scale;
    prev_rate = p.rate_scale;
  }
}

TEST(Synthesize, OneWord) {
  const Narration n = synthesize_segment(segment("Go"), voice());
  ASSERT_EQ(n.transcript.entries.size(), 1u);
  EXPECT_EQ(n.transcript.entries[0].onset_s, 0.0);
  EXPECT_EQ(n.transcript.entries[0].word, "go");
  EXPECT_FALSE(check_transcript(n.transcript, n.audio.duration_s()));
}

TEST(Synthesize, Deterministic) {
  const Narration a = synthesize_segment(segment("The sea was calm tonight."), voice());
  const Narration b = synthesize_segment(segment("The sea was calm tonight."), voice());
  EXPECT_EQ(a.audio, b.audio);
  EXPECT_EQ(a.transcript, b.transcript);
}

TEST(Synthesize, DurationFollowsWordsPerMinute) {
  ASSERT_EQ(tokenize_words(kThirtyWords).size(), 30u);
  const Narration n = synthesize_segment(segment(kThirtyWords), voice(120.0, 150.0));
  EXPECT_NEAR(n.audio.duration_s(), 12.0, 2.4);
  EXPECT_EQ(n.audio.sample_rate(), 48000);
  EXPECT_TRUE(n.audio.all_finite());
}

TEST(Synthesize, TranscriptMatchesPlanAndWordCount) {
  const Segment s = segment("\"Wait,\" she said \xE2\x80\x94 and the lamp went out.");
  const ProsodyParams p = apply_prosody(0.4);
  const Narration n = synthesize_segment(s, voice(), p);
  EXPECT_EQ(n.transcript.entries.size(), tokenize_words(s.text).size());
  EXPECT_EQ(n.transcript, plan_transcript(s, voice(), p));
  EXPECT_DOUBLE_EQ(n.audio.duration_s(), std::ceil(planned_duration_s(s, voice(), p) * 48000) / 48000);
  EXPECT_FALSE(check_transcript(n.transcript, n.audio.duration_s()));
}

TEST(Synthesize, PitchScaleRaisesFundamental) {
  const Segment s = segment("Low and slow, along the road.");
  const double f_lo = autocorr_f0(synthesize_segment(s, voice(110.0)).audio);
  ProsodyParams p;
  p.pitch_scale = 1.4;
  const double f_hi = autocorr_f0(synthesize_segment(s, voice(110.0), p).audio);
  EXPECT_GT(f_hi, f_lo);
}

TEST(Synthesize, IntensityScalesRms) {
  const Segment s = segment("Over the water the bell rang twice.");
  ProsodyParams a, b;
  a.intensity_scale = 0.4;
  b.intensity_scale = 0.8;
  const Narration na = synthesize_segment(s, voice(), a);
  const Narration nb = synthesize_segment(s, voice(), b);
  const auto ca = na.audio.channel(0);
  const auto cb = nb.audio.channel(0);
  const double ratio = oracle::rms({cb.begin(), cb.end()}) / oracle::rms({ca.begin(), ca.end()});
  EXPECT_NEAR(ratio, 2.0, 0.02);
}

TEST(CheckTranscript, RejectsOverlap) {
  TimedTranscript t;
  t.entries = {{"a", 0.0, 0.5, {}}, {"b", 0.4, 0.2, {}}};
  EXPECT_TRUE(check_transcript(t, 1.0));
  t.entries[1].onset_s = 0.5;
  EXPECT_FALSE(check_transcript(t, 1.0));
  EXPECT_TRUE(check_transcript(t, 0.6));
}

namespace {

// Adapter that ignores its input and prints `response`, with a one-frame
// WAV written next to it.
AdapterConfig echo_adapter(const fixtures::TempDir& dir, const nlohmann::json& response, double seconds) {
  write_wav(AudioBuffer(24000, 1, static_cast<std::size_t>(seconds * 24000)), dir.path() / "voice.wav");
  std::ofstream(dir.path() / "response.json") << response.dump();
  AdapterConfig c;
  c.command = {"/bin/sh", "-c", "cat > /dev/null; cat response.json"};
  c.working_dir = dir.path();
  c.fallback_to_builtin = false;
  return c;
}

}  // namespace

TEST(Adapter, EchoedFixtureResponseIsParsed) {
  fixtures::TempDir dir("adapter");
  const nlohmann::json resp = {{"wav_path", "voice.wav"},
                               {"words", {{{"w", "Hello"}, {"onset_s", 0.1}, {"dur_s", 0.3}},
                                          {{"w", "world."}, {"onset_s", 0.5}, {"dur_s", 0.4}}}}};
  const Narration n = external_narrate(segment("Hello world."), voice(), echo_adapter(dir, resp, 1.0));
  ASSERT_EQ(n.transcript.entries.size(), 2u);
  EXPECT_EQ(n.transcript.entries[0].word, "hello");
  EXPECT_EQ(n.transcript.entries[0].onset_s, 0.1);
  EXPECT_EQ(n.transcript.entries[1].duration_s, 0.4);
  EXPECT_EQ(n.audio.sample_rate(), 48000);
  EXPECT_EQ(n.audio.frames(), 48000u);
}

TEST(Adapter, OverlappingTimestampsRejected) {
  fixtures::TempDir dir("adapter");
  const nlohmann::json resp = {{"wav_path", "voice.wav"},
                               {"words", {{{"w", "Hello"}, {"onset_s", 0.1}, {"dur_s", 0.6}},
                                          {{"w", "world"}, {"onset_s", 0.5}, {"dur_s", 0.4}}}}};
  try {
    external_narrate(segment("Hello world."), voice(), echo_adapter(dir, resp, 1.0));
    FAIL();
  } catch (const AdapterError& e) {
    EXPECT_EQ(e.kind(), AdapterErrorKind::kTimestampViolation);
  }
}

TEST(Adapter, SchemaViolation) {
  fixtures::TempDir dir("adapter");
  const nlohmann::json resp = {{"words", nlohmann::json::array()}};
  try {
    external_narrate(segment("Hello world."), voice(), echo_adapter(dir, resp, 1.0));
    FAIL();
  } catch (const AdapterError& e) {
    EXPECT_EQ(e.kind(), AdapterErrorKind::kSchemaViolation);
  }
}

TEST(Adapter, MissingCommandIsConfigurationError) {
  try {
    external_narrate(segment("Hello."), voice(), AdapterConfig{});
    FAIL();
  } catch (const AdapterError& e) {
    EXPECT_EQ(e.kind(), AdapterErrorKind::kNotConfigured);
  }
}

TEST(Adapter, NonzeroExitFallsBackWhenAllowed) {
  AdapterConfig c;
  c.command = {"/bin/sh", "-c", "exit 3"};
  c.fallback_to_builtin = false;
  try {
    external_narrate(segment("Hello."), voice(), c);
    FAIL();
  } catch (const AdapterError& e) {
    EXPECT_EQ(e.kind(), AdapterErrorKind::kNonzeroExit);
  }
  EXPECT_THROW(narrate(segment("Hello."), voice(), {}, &c), AdapterError);
  c.fallback_to_builtin = true;
  const NarrationOutcome out = narrate(segment("Hello."), voice(), {}, &c);
  EXPECT_FALSE(out.external);
  ASSERT_EQ(out.warnings.size(), 1u);
  EXPECT_EQ(out.narration.audio, synthesize_segment(segment("Hello."), voice()).audio);
}

TEST(Adapter, RequestCarriesProsody) {
  ProsodyParams p;
  p.pitch_scale = 1.1;
  p.rate_scale = 0.9;
  const auto j = adapter_request(segment("Hi."), voice(200.0, 150.0, 9), p);
  EXPECT_EQ(j.at("text"), "Hi.");
  EXPECT_DOUBLE_EQ(j.at("pitch_hz").get<double>(), 220.0);
  EXPECT_DOUBLE_EQ(j.at("rate_wpm").get<double>(), 135.0);
  EXPECT_EQ(j.at("seed"), 9);
}

TEST(Adapter, StretchNarratorStretchesTimeline) {
  fixtures::TempDir dir("stretch");
  AdapterConfig c;
  c.command = {fixtures::stretch_narrator_path().string(), "1.25"};
  c.working_dir = dir.path();
  c.fallback_to_builtin = false;
  const Segment s = segment("The lamp turned once more above the harbor.");
  const Narration base = synthesize_segment(s, voice());
  const Narration slow = external_narrate(s, voice(), c);
  EXPECT_NEAR(static_cast<double>(slow.audio.frames()), 1.25 * static_cast<double>(base.audio.frames()), 1.0);
  ASSERT_EQ(slow.transcript.entries.size(), base.transcript.entries.size());
  for (std::size_t i = 0; i < base.transcript.entries.size(); ++i)
    EXPECT_NEAR(slow.transcript.entries[i].onset_s, 1.25 * base.transcript.entries[i].onset_s, 1e-12);
}
