#pragma once

#include <array>
#include <vector>

#include "audiobook/audio/buffer.hpp"

namespace audiobook {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

// Shoebox room. Wall order: x=0, x=Lx, y=0, y=Ly, z=0 (floor), z=Lz.
// The listener faces +x, +y is to the left and +z is up.
struct RoomModel {
  Vec3 dimensions{5.0, 4.0, 3.0};
  std::array<double, 6> absorption{0.35, 0.35, 0.35, 0.35, 0.35, 0.35};
  Vec3 source{1.0, 1.0, 1.5};
  Vec3 listener{2.5, 2.0, 1.5};

  // Throws std::invalid_argument on degenerate geometry or absorption
  // outside (0, 1].
  void validate() const;
};

struct SdnOptions {
  bool include_direct = true;
  double max_seconds = 3.0;
  double floor_db = -100.0;  // tail below this (relative to peak) is cut
};

// N - 1 = 5 neighbours per node: S = (2/5) J - I.
std::vector<std::vector<double>> sdn_scattering_matrix();

// Scattering delay network with one node per wall at the first-order
// reflection point. The source feeds every node through a 1/distance line
// (half the pressure into each incoming wave), nodes exchange waves over
// lossless geometric delay lines, each node scatters with S and the wall
// gain sqrt(1 - absorption), and node pressure reaches the listener with
// gain 1 / (1 + d_node_listener / d_source_node). Node and direct
// contributions are panned to stereo by their azimuth at the listener.
ImpulseResponse sdn_impulse_response(const RoomModel& room, int rate, const SdnOptions& options = {});

// Stereo wet signal: mono dry convolved with the network response.
AudioBuffer sdn_reverb(const AudioBuffer& dry, const RoomModel& room, const SdnOptions& options = {});

}  // namespace audiobook
