#pragma once

#include <vector>

#include "audiobook/audio/buffer.hpp"
#include "audiobook/script/types.hpp"

namespace audiobook {

// Gain 1/max(d, 1); for d > 1 also a one-pole low-pass at 20000/d Hz.
AudioBuffer distance_attenuate(const AudioBuffer& buf, double distance_m);

// Same law with the distance updated every kDirectionBlock samples
// (distances[b] applies from block b on, gain ramping between blocks).
AudioBuffer distance_attenuate_moving(const AudioBuffer& buf, const std::vector<double>& distances);

// Position along a trajectory at cue time t: linear interpolation between
// keyframes, held before the first and after the last.
TrajectoryKey trajectory_at(const std::vector<TrajectoryKey>& trajectory, double t);

struct DopplerResult {
  AudioBuffer audio;
  // Emission time (seconds of input) heard at every output sample.
  std::vector<double> emission_time;
};

// Variable delay line: the sample heard at time t left the source at the
// emission time tau solving tau + d(tau)/343 = t. Reads use 4-point
// Lagrange interpolation. A constant distance is a pure delay of d/343 s.
DopplerResult doppler_shift(const AudioBuffer& buf, const std::vector<TrajectoryKey>& trajectory);

}  // namespace audiobook
