#pragma once

#include <cstddef>
#include <vector>

#include "audiobook/audio/buffer.hpp"

namespace audiobook {

inline constexpr double kSpeedOfSound = 343.0;
inline constexpr int kMaxAmbisonicOrder = 3;
inline constexpr std::size_t kDirectionBlock = 256;

// ACN channel order, SN3D normalization. Channel count is (order + 1)^2.
struct AmbisonicBuffer {
  int order = 1;
  int sample_rate = kCanonicalRate;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

// Real SN3D spherical harmonics without the Condon-Shortley phase, in ACN
// order, for azimuth (positive = left) and elevation in degrees.
std::vector<double> sh_gains(double azimuth_deg, double elevation_deg, int order);

AmbisonicBuffer hoa_encode(const AudioBuffer& mono, double azimuth_deg, double elevation_deg, int order);

struct Direction {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
};

// Moving-source encode. directions[b] is the direction at the start of
// block b (kDirectionBlock samples); gains ramp linearly from one block
// start to the next and hold after the last entry.
AmbisonicBuffer hoa_encode_moving(const AudioBuffer& mono, const std::vector<Direction>& directions, int order);

enum class PlaybackMode { kBinaural, kStereoSpeakers };

struct ListenerProfile {
  PlaybackMode mode = PlaybackMode::kBinaural;
  double head_radius = 0.0875;  // meters, 0.06..0.12
};

// Samples added after the input length to hold interaural delay tails.
inline constexpr std::size_t kDecodeTail = 64;

struct DecoderOptions {
  int speakers = 8;
  std::size_t block = kDirectionBlock;
  std::size_t path_ir_taps = 512;
};

// Sampling decode to a horizontal ring of virtual speakers, then to two
// channels (left, right).
//
// Binaural: every speaker feed passes through a spherical-head shadow
// filter per ear (one pole, one zero, set by the angle between speaker and
// ear) and the filtered feeds are summed per ear. The interaural delay is
// not applied per speaker: summing eight differently delayed copies of a
// coherent source smears the cross-correlation peak and makes the level
// comb-filter with azimuth. Instead each block's energy-vector azimuth sets
// one Woodworth delay per ear, applied with a windowed-sinc fractional
// delay. A per-block gain rescales the ear signals to the energy they would
// have if the speaker feeds were mutually incoherent, which keeps loudness
// independent of source direction.
//
// Stereo speakers: tangent-law constant-power panning of each virtual
// speaker between +/-30 degrees (rear speakers fold onto the front), with
// the same per-block energy normalization and no interaural delay.
AudioBuffer hoa_decode(const AmbisonicBuffer& ambi, const ListenerProfile& profile,
                       const DecoderOptions& options = {});

// Woodworth delay (seconds) from a source at azimuth_deg to an ear at
// ear_azimuth_deg, measured from the ear nearest to the source.
double woodworth_ear_delay(double azimuth_deg, double ear_azimuth_deg, double head_radius);

// Interaural time difference a (theta + sin theta) / c for a lateral angle.
double woodworth_itd(double lateral_deg, double head_radius);

}  // namespace audiobook
