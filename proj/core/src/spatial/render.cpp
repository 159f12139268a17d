#include "audiobook/spatial/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "audiobook/audio/convolve.hpp"
#include "audiobook/spatial/propagation.hpp"
#include "audiobook/spatial/sdn.hpp"

namespace audiobook {
namespace {

constexpr double kWallMargin = 0.1;

RoomModel place(const EnvironmentPreset& env, double az_deg, double el_deg, double distance) {
  RoomModel room;
  room.dimensions = env.dimensions;
  room.absorption.fill(env.absorption);
  const Vec3& L = env.dimensions;
  room.listener = {L.x / 2, L.y / 2, L.z / 2};
  const double az = az_deg * std::numbers::pi / 180.0;
  const double el = el_deg * std::numbers::pi / 180.0;
  auto clamp = [](double v, double hi) { return std::clamp(v, kWallMargin, hi - kWallMargin); };
  room.source = {clamp(room.listener.x + distance * std::cos(el) * std::cos(az), L.x),
                 clamp(room.listener.y + distance * std::cos(el) * std::sin(az), L.y),
                 clamp(room.listener.z + distance * std::sin(el), L.z)};
  return room;
}

void add_scaled(AudioBuffer& out, const AudioBuffer& in, double gain) {
  if (in.frames() > out.frames()) out.resize_frames(in.frames());
  for (std::size_t c = 0; c < out.channel_count(); ++c) {
    auto dst = out.channel(c);
    auto src = in.channel(c);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += gain * src[i];
  }
}

}  // namespace

RenderedCue render_cue(const CueAudio& cue, const SpatialSpec& spec, const EnvironmentPreset& env,
                       const ListenerProfile& profile, int order) {
  if (cue.buffer.channel_count() != 1) throw std::invalid_argument("render_cue: cue audio must be mono");
  RenderedCue result;
  AudioBuffer source = cue.buffer;
  AmbisonicBuffer ambi;
  double az0 = spec.azimuth, el0 = spec.elevation, d0 = spec.distance;

  if (!spec.trajectory.empty()) {
    const TrajectoryKey start = trajectory_at(spec.trajectory, 0.0);
    az0 = start.azimuth;
    el0 = start.elevation;
    d0 = start.distance;
    result.latency_s = d0 / kSpeedOfSound;
    DopplerResult shifted = doppler_shift(cue.buffer, spec.trajectory);
    source = std::move(shifted.audio);
    const std::size_t blocks = (source.frames() + kDirectionBlock - 1) / kDirectionBlock;
    std::vector<double> distances(blocks);
    std::vector<Direction> directions(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const double tau = shifted.emission_time[b * kDirectionBlock];
      const TrajectoryKey k = trajectory_at(spec.trajectory, tau);
      distances[b] = k.distance;
      directions[b] = {k.azimuth, k.elevation};
    }
    ambi = hoa_encode_moving(distance_attenuate_moving(source, distances), directions, order);
  } else {
    ambi = hoa_encode(distance_attenuate(source, spec.distance), spec.azimuth, spec.elevation, order);
  }
  result.audio = hoa_decode(ambi, profile);

  if (env.wet_ratio > 0.0) {
    const RoomModel room = place(env, az0, el0, d0);
    SdnOptions opt;
    opt.include_direct = false;
    ImpulseResponse ir = sdn_impulse_response(room, source.sample_rate(), opt);
    // The dry path carries no static propagation delay, so the wet path is
    // advanced by the direct delay to keep the two aligned.
    const double dx = room.source.x - room.listener.x, dy = room.source.y - room.listener.y,
                 dz = room.source.z - room.listener.z;
    const auto advance = static_cast<std::size_t>(
        std::llround(std::sqrt(dx * dx + dy * dy + dz * dz) / kSpeedOfSound * source.sample_rate()));
    for (auto& ch : ir.taps) {
      const std::size_t cut = std::min(advance, ch.size() - 1);
      ch.erase(ch.begin(), ch.begin() + static_cast<std::ptrdiff_t>(cut));
    }
    add_scaled(result.audio, convolve(source, ir), env.wet_ratio);
  }
  return result;
}

}  // namespace audiobook
