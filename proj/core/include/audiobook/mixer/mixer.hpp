#pragma once

#include <map>
#include <string>
#include <vector>

#include "audiobook/audio/buffer.hpp"
#include "audiobook/spatial/ambisonics.hpp"
#include "audiobook/temporal/dtw.hpp"

namespace audiobook {

inline constexpr double kSilenceFloorDb = -120.0;
// Layers may run past the end of the narration by at most this much.
inline constexpr double kLayerGuardS = 10.0;

double db_to_gain(double db);
// 20 log10(gain), floored at kSilenceFloorDb.
double gain_to_db(double gain);

struct LoudnessStats {
  double rms_db = kSilenceFloorDb;
  double peak_db = kSilenceFloorDb;
};

// RMS over every sample of every channel, and the absolute peak.
LoudnessStats measure_loudness(const AudioBuffer& buf);

// Layer gain keyframe; time is relative to the layer onset.
struct GainKey {
  double time_s = 0.0;
  double gain = 1.0;

  friend bool operator==(const GainKey&, const GainKey&) = default;
};

// Linear interpolation between keyframes, held outside them, 1 if empty.
double automation_gain(const std::vector<GainKey>& keys, double t);

struct LayerPlan {
  std::string cue_id;
  double onset_s = 0.0;
  std::vector<GainKey> automation;

  friend bool operator==(const LayerPlan&, const LayerPlan&) = default;
};

struct MixTargets {
  double narration_rms_db = -20.0;
  double bed_rms_db = -32.0;
  double ceiling_db = -1.0;

  friend bool operator==(const MixTargets&, const MixTargets&) = default;
};

struct MixPlan {
  double narration_gain = 1.0;  // w_f
  std::vector<LayerPlan> layers;  // w_b per layer as automation
  PlaybackMode profile = PlaybackMode::kBinaural;
  MixTargets targets;

  // Throws std::invalid_argument: negative onsets or gains, keyframe times
  // not increasing, ceiling above 0 dB, duplicate layer ids.
  void validate() const;

  friend bool operator==(const MixPlan&, const MixPlan&) = default;
};

// A_c = w_f A_f + sum of w_b A_b. Narration (mono is copied to both
// channels) is summed first, then layers in cue_id order, each placed at
// round(onset * rate). Samples where a layer gain is exactly 0 are not
// touched. Throws std::invalid_argument on missing layer audio, rate
// mismatch, or a layer ending more than kLayerGuardS past the narration.
AudioBuffer mix_layers(const MixPlan& plan, const AudioBuffer& narration,
                       const std::map<std::string, AudioBuffer>& layers, int threads = 1);

struct DuckOptions {
  double depth_db = -8.0;
  double attack_ms = 10.0;
  double release_ms = 250.0;
  double threshold_db = -45.0;
};

// Gain toward 10^(depth/20) while the foreground envelope (absolute dB) is
// above threshold, toward 1 otherwise, through a one-pole smoother with
// the attack constant when falling and the release constant when rising.
AudioBuffer duck(const AudioBuffer& bg, const FeatureSeries& fg_envelope, const DuckOptions& options = {});

inline constexpr double kLimiterLookaheadS = 0.005;
inline constexpr double kLimiterReleaseS = 0.05;

struct LimitResult {
  AudioBuffer audio;
  std::vector<double> gain;  // per frame, empty when the input was untouched
};

// Look-ahead peak limiter. The gain falls linearly over the look-ahead
// window to exactly the level that keeps each frame under the ceiling and
// recovers with a one-pole release. Input that never exceeds the ceiling
// is returned bit for bit.
LimitResult limit_with_gain(const AudioBuffer& buf, double ceiling_db);
AudioBuffer limit(const AudioBuffer& buf, double ceiling_db);

// Stereo speakers: side content (L - R) / 2 scaled by -3 dB. Binaural:
// identity.
AudioBuffer apply_profile(const AudioBuffer& buf, PlaybackMode profile);

struct MasterResult {
  AudioBuffer audio;
  double gain = 1.0;  // normalization gain before the limiter
  std::vector<double> limiter_gain;
};

// Profile transform, then one gain that brings the narration solo path to
// targets.narration_rms_db, then the limiter at targets.ceiling_db.
MasterResult master(const MixPlan& plan, const AudioBuffer& mixed, const AudioBuffer& narration_solo);

}  // namespace audiobook
