#include <audiobook/mixer/mixer.hpp>

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace audiobook;

namespace {

constexpr int kRate = 48000;

AudioBuffer constant(double v, double seconds, std::size_t channels = 1) {
  return AudioBuffer(kRate, std::vector<std::vector<double>>(channels, std::vector<double>(static_cast<std::size_t>(seconds * kRate), v)));
}

LayerPlan layer(const std::string& id, double onset, std::vector<GainKey> keys = {}) {
  LayerPlan l;
  l.cue_id = id;
  l.onset_s = onset;
  l.automation = std::move(keys);
  return l;
}

}  // namespace

TEST(Loudness, SquareAndSine) {
  std::vector<double> sq(48000);
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (i / 100) % 2 ? 0.5 : -0.5;
  EXPECT_NEAR(measure_loudness(AudioBuffer::mono(kRate, sq)).rms_db, 20.0 * std::log10(0.5), 1e-9);
  const LoudnessStats s = measure_loudness(AudioBuffer::mono(kRate, oracle::sine(1000.0, 1.0, 1.0, kRate)));
  EXPECT_NEAR(s.rms_db, -3.0103, 1e-3);
  EXPECT_NEAR(s.peak_db, 0.0, 1e-6);
  const LoudnessStats h = measure_loudness(AudioBuffer::mono(kRate, oracle::sine(1000.0, 0.5, 1.0, kRate)));
  EXPECT_NEAR(h.rms_db, -9.0309, 1e-3);
  EXPECT_NEAR(h.peak_db, -6.0206, 1e-3);
}

TEST(Loudness, SilenceFloor) {
  const LoudnessStats s = measure_loudness(AudioBuffer(kRate, 2, 1000));
  EXPECT_EQ(s.rms_db, kSilenceFloorDb);
  EXPECT_EQ(s.peak_db, kSilenceFloorDb);
  EXPECT_THROW(measure_loudness(AudioBuffer()), std::invalid_argument);
}

TEST(Automation, Interpolation) {
  EXPECT_EQ(automation_gain({}, 3.0), 1.0);
  const std::vector<GainKey> k = {{1.0, 0.0}, {3.0, 1.0}};
  EXPECT_EQ(automation_gain(k, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(automation_gain(k, 2.0), 0.5);
  EXPECT_EQ(automation_gain(k, 9.0), 1.0);
}

TEST(Duck, SilentForegroundLeavesBedAlone) {
  const AudioBuffer bg = AudioBuffer::mono(kRate, oracle::white_noise(48000, 4, 0.2));
  FeatureSeries fg{std::vector<double>(40, -90.0), 0.025};
  EXPECT_EQ(duck(bg, fg), bg);
}

TEST(Duck, FollowsOnePoleTowardsDepth) {
  const AudioBuffer bg = constant(1.0, 3.0);
  // Foreground active over [1, 2) s.
  FeatureSeries fg{std::vector<double>(120, -90.0), 0.025};
  for (std::size_t k = 40; k < 80; ++k) fg.values[k] = -10.0;
  DuckOptions o;
  o.depth_db = -12.0;
  const AudioBuffer out = duck(bg, fg, o);
  const double low = std::pow(10.0, -12.0 / 20.0);
  const double a_att = 1.0 - std::exp(-1.0 / (0.010 * kRate));
  const double a_rel = 1.0 - std::exp(-1.0 / (0.250 * kRate));
  const auto y = out.channel(0);
  EXPECT_EQ(y[47999], 1.0);
  for (std::size_t n : {1u, 100u, 480u, 4800u}) {
    EXPECT_NEAR(y[48000 + n - 1], oracle::one_pole_after(1.0, low, a_att, n), 1e-9) << n;
  }
  EXPECT_NEAR(y[95999], low, 1e-6);
  EXPECT_NEAR(low, 0.2512, 1e-4);
  const double at_end = y[95999];
  for (std::size_t n : {1u, 12000u, 48000u}) {
    EXPECT_NEAR(y[96000 + n - 1], oracle::one_pole_after(at_end, 1.0, a_rel, n), 1e-9) << n;
  }
}

TEST(MixLayers, NoLayersIsNarration) {
  const AudioBuffer narr = AudioBuffer::mono(kRate, oracle::white_noise(24000, 1, 0.3));
  MixPlan plan;
  const AudioBuffer out = mix_layers(plan, narr, {});
  ASSERT_EQ(out.channel_count(), 2u);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < narr.frames(); ++i) EXPECT_EQ(out.channel(c)[i], narr.channel(0)[i]);
}

TEST(MixLayers, ZeroBackgroundWeightIsBitwiseNarration) {
  const AudioBuffer narr(kRate, {oracle::white_noise(48000, 2, 0.3), oracle::white_noise(48000, 3, 0.3)});
  MixPlan plan;
  plan.layers = {layer("b", 0.2, {{0.0, 0.0}}), layer("a", 0.5, {{0.0, 0.0}})};
  std::map<std::string, AudioBuffer> audio = {{"a", constant(0.7, 0.3)}, {"b", constant(-0.4, 0.6, 2)}};
  EXPECT_EQ(mix_layers(plan, narr, audio), narr);
}

TEST(MixLayers, OverlappingLayersSum) {
  const AudioBuffer narr = constant(0.1, 1.0);
  MixPlan plan;
  plan.narration_gain = 0.5;
  plan.layers = {layer("x", 0.25), layer("y", 0.5, {{0.0, 0.5}})};
  std::map<std::string, AudioBuffer> audio = {{"x", constant(0.2, 0.5)}, {"y", constant(0.2, 0.25)}};
  const AudioBuffer out = mix_layers(plan, narr, audio);
  const auto l = out.channel(0);
  EXPECT_DOUBLE_EQ(l[100], 0.05);
  EXPECT_DOUBLE_EQ(l[13000], 0.05 + 0.2);
  EXPECT_DOUBLE_EQ(l[25000], 0.05 + 0.2 + 0.1);
  EXPECT_DOUBLE_EQ(l[37000], 0.05);
}

TEST(MixLayers, LinearInLayerAudio) {
  const AudioBuffer narr = AudioBuffer(kRate, 2, 48000);
  MixPlan plan;
  plan.layers = {layer("n", 0.1, {{0.0, 0.3}, {0.5, 0.9}})};
  const auto a = oracle::white_noise(24000, 8, 0.3), b = oracle::white_noise(24000, 9, 0.3);
  std::vector<double> sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sum[i] = 2.0 * a[i] + b[i];
  const AudioBuffer ya = mix_layers(plan, narr, {{"n", AudioBuffer::mono(kRate, a)}});
  const AudioBuffer yb = mix_layers(plan, narr, {{"n", AudioBuffer::mono(kRate, b)}});
  const AudioBuffer ys = mix_layers(plan, narr, {{"n", AudioBuffer::mono(kRate, sum)}});
  for (std::size_t i = 0; i < ys.frames(); ++i) EXPECT_NEAR(ys.channel(1)[i], 2.0 * ya.channel(1)[i] + yb.channel(1)[i], 1e-12);
}

TEST(MixLayers, ThreadCountDoesNotChangeOutput) {
  const AudioBuffer narr = AudioBuffer::mono(kRate, oracle::white_noise(48000, 5));
  MixPlan plan;
  std::map<std::string, AudioBuffer> audio;
  for (int k = 0; k < 6; ++k) {
    const std::string id = "L" + std::to_string(k);
    plan.layers.push_back(layer(id, 0.1 * k, {{0.0, 0.2}, {0.3, 0.8}}));
    audio[id] = AudioBuffer::mono(kRate, oracle::white_noise(20000, 10 + k, 0.2));
  }
  EXPECT_EQ(mix_layers(plan, narr, audio, 1), mix_layers(plan, narr, audio, 4));
}

TEST(MixLayers, Errors) {
  const AudioBuffer narr = constant(0.1, 1.0);
  MixPlan plan;
  plan.layers = {layer("late", 5.0)};
  EXPECT_THROW(mix_layers(plan, narr, {}), std::invalid_argument);
  EXPECT_THROW(mix_layers(plan, narr, {{"late", constant(0.1, 6.5)}}), std::invalid_argument);
  EXPECT_NO_THROW(mix_layers(plan, narr, {{"late", constant(0.1, 5.5)}}));
  EXPECT_THROW(mix_layers(plan, narr, {{"late", AudioBuffer(44100, 1, 100)}}), std::invalid_argument);
  plan.layers = {layer("neg", -1.0)};
  EXPECT_THROW(plan.validate(), std::invalid_argument);
  plan.layers = {layer("k", 0.0, {{1.0, 0.5}, {0.5, 0.5}})};
  EXPECT_THROW(plan.validate(), std::invalid_argument);
  plan.layers = {layer("d", 0.0), layer("d", 1.0)};
  EXPECT_THROW(plan.validate(), std::invalid_argument);
}

TEST(Limiter, TransparentBelowCeiling) {
  const AudioBuffer x = AudioBuffer::mono(kRate, oracle::sine(440.0, 0.5, 1.0, kRate));
  const LimitResult r = limit_with_gain(x, -1.0);
  EXPECT_EQ(r.audio, x);
  EXPECT_TRUE(r.gain.empty());
}

TEST(Limiter, HoldsCeilingOnHotSignal) {
  const AudioBuffer x = AudioBuffer(kRate, {oracle::sine(440.0, 2.0, 1.0, kRate), oracle::white_noise(48000, 3, 1.5)});
  const double ceiling = std::pow(10.0, -1.0 / 20.0);
  const AudioBuffer y = limit(x, -1.0);
  EXPECT_LE(y.peak(), ceiling);
  EXPECT_TRUE(y.all_finite());
  EXPECT_THROW(limit(x, 0.5), std::invalid_argument);
}

TEST(Limiter, RecoversAfterTransient) {
  std::vector<double> x(48000, 0.25);
  x[10000] = 2.0;
  const LimitResult r = limit_with_gain(AudioBuffer::mono(kRate, x), -1.0);
  const double need = std::pow(10.0, -1.0 / 20.0) / 2.0;
  EXPECT_NEAR(r.gain[10000], need, 1e-12);
  // The fall starts one look-ahead window early.
  EXPECT_EQ(r.gain[10000 - 241], 1.0);
  EXPECT_LT(r.gain[10000 - 120], 1.0);
  const double a_rel = 1.0 - std::exp(-1.0 / (kLimiterReleaseS * kRate));
  for (std::size_t n : {1u, 2400u, 12000u}) {
    EXPECT_NEAR(r.gain[10000 + n], oracle::one_pole_after(need, 1.0, a_rel, n), 1e-9) << n;
  }
}

TEST(Profile, StereoSpeakersNarrowsSide) {
  const AudioBuffer x(kRate, {std::vector<double>(10, 1.0), std::vector<double>(10, 0.0)});
  EXPECT_EQ(apply_profile(x, PlaybackMode::kBinaural), x);
  const AudioBuffer y = apply_profile(x, PlaybackMode::kStereoSpeakers);
  const double g = std::pow(10.0, -3.0 / 20.0);
  EXPECT_NEAR(y.channel(0)[0], 0.5 + 0.5 * g, 1e-12);
  EXPECT_NEAR(y.channel(1)[0], 0.5 - 0.5 * g, 1e-12);
  const AudioBuffer mono_like(kRate, {std::vector<double>(10, 0.3), std::vector<double>(10, 0.3)});
  EXPECT_EQ(apply_profile(mono_like, PlaybackMode::kStereoSpeakers), mono_like);
}

TEST(Master, NormalizesNarrationToTarget) {
  const AudioBuffer narr = AudioBuffer::mono(kRate, oracle::white_noise(48000, 6, 0.05));
  MixPlan plan;
  const AudioBuffer mixed = mix_layers(plan, narr, {});
  const MasterResult m = master(plan, mixed, narr);
  EXPECT_NEAR(measure_loudness(m.audio).rms_db, -20.0, 0.01);
  EXPECT_NEAR(gain_to_db(m.gain), -20.0 - measure_loudness(narr).rms_db, 1e-9);
  EXPECT_LE(m.audio.peak(), std::pow(10.0, -1.0 / 20.0));
}

TEST(Master, AlreadyAtTargetPassesThrough) {
  const AudioBuffer tone = AudioBuffer::mono(kRate, oracle::sine(300.0, std::sqrt(2.0) * 0.1, 1.0, kRate));
  MixPlan plan;
  const AudioBuffer mixed = mix_layers(plan, tone, {});
  const MasterResult m = master(plan, mixed, tone);
  EXPECT_NEAR(m.gain, 1.0, 1e-3);
  EXPECT_TRUE(m.limiter_gain.empty());
}
