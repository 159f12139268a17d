#pragma once

#include "audiobook/script/types.hpp"
#include "audiobook/sfx/sfx.hpp"
#include "audiobook/spatial/ambisonics.hpp"
#include "audiobook/spatial/environment.hpp"

namespace audiobook {

struct RenderedCue {
  AudioBuffer audio;  // stereo
  // Propagation delay of the first sample (direct path at trajectory
  // start); zero for static sources, which are rendered without delay.
  double latency_s = 0.0;
};

// Doppler (moving sources), distance law, ambisonic encode (per block for
// moving sources), decode, plus the network reverb of the environment
// scaled by its wet ratio. The listener sits at the room centre and the
// source at its spatial position, clamped inside the room.
RenderedCue render_cue(const CueAudio& cue, const SpatialSpec& spec, const EnvironmentPreset& env,
                       const ListenerProfile& profile, int order);

}  // namespace audiobook
