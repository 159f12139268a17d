#pragma once

#include "audiobook/audio/buffer.hpp"

namespace audiobook {

// Kaiser-windowed sinc interpolation (32 zero crossings per side, anti-alias
// cutoff scaled on downsampling). Output frame count is
// round(frames * target / source). Same-rate input is returned unchanged.
AudioBuffer resample(const AudioBuffer& buf, int target_rate);

// Averages all channels into one.
AudioBuffer mixdown_mono(const AudioBuffer& buf);

}  // namespace audiobook
