#include "audiobook/spatial/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "audiobook/audio/filters.hpp"
#include "audiobook/spatial/ambisonics.hpp"

namespace audiobook {
namespace {

double air_cutoff(double distance_m) { return 20000.0 / std::max(distance_m, 1.0); }

// 4-point Lagrange interpolation at fractional index p; zero outside x.
double lagrange_read(std::span<const double> x, double p) {
  const double fl = std::floor(p);
  const double mu = p - fl;
  const auto i = static_cast<long long>(fl);
  const auto at = [&](long long k) {
    return k >= 0 && k < static_cast<long long>(x.size()) ? x[static_cast<std::size_t>(k)] : 0.0;
  };
  if (mu == 0.0) return at(i);
  const double xm1 = at(i - 1), x0 = at(i), x1 = at(i + 1), x2 = at(i + 2);
  const double cm1 = -mu * (mu - 1.0) * (mu - 2.0) / 6.0;
  const double c0 = (mu + 1.0) * (mu - 1.0) * (mu - 2.0) / 2.0;
  const double c1 = -(mu + 1.0) * mu * (mu - 2.0) / 2.0;
  const double c2 = (mu + 1.0) * mu * (mu - 1.0) / 6.0;
  return cm1 * xm1 + c0 * x0 + c1 * x1 + c2 * x2;
}

}  // namespace

AudioBuffer distance_attenuate(const AudioBuffer& buf, double distance_m) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("distance must be positive");
  const double gain = 1.0 / std::max(distance_m, 1.0);
  AudioBuffer out = buf;
  for (std::size_t c = 0; c < out.channel_count(); ++c) {
    auto ch = out.channel(c);
    if (distance_m <= 1.0) {
      for (double& s : ch) s *= gain;
      continue;
    }
    OnePoleLowpass lp(buf.sample_rate(), air_cutoff(distance_m));
    for (double& s : ch) s = gain * lp.process(s);
  }
  return out;
}

AudioBuffer distance_attenuate_moving(const AudioBuffer& buf, const std::vector<double>& distances) {
  if (distances.empty()) throw std::invalid_argument("distance_attenuate_moving needs distances");
  for (double d : distances) {
    if (!(d > 0.0)) throw std::invalid_argument("distance must be positive");
  }
  AudioBuffer out = buf;
  const double rate = buf.sample_rate();
  for (std::size_t c = 0; c < out.channel_count(); ++c) {
    auto ch = out.channel(c);
    OnePoleLowpass lp(rate, air_cutoff(distances.front()));
    for (std::size_t start = 0, b = 0; start < ch.size(); start += kDirectionBlock, ++b) {
      const double d0 = distances[std::min(b, distances.size() - 1)];
      const double d1 = distances[std::min(b + 1, distances.size() - 1)];
      lp.set_cutoff(rate, air_cutoff(d0));
      const double g0 = 1.0 / std::max(d0, 1.0);
      const double g1 = 1.0 / std::max(d1, 1.0);
      const std::size_t end = std::min(ch.size(), start + kDirectionBlock);
      for (std::size_t i = start; i < end; ++i) {
        const double u = static_cast<double>(i - start) / kDirectionBlock;
        // The filter keeps running inside 1 m so its state is current when
        // the source moves away again.
        const double filtered = lp.process(ch[i]);
        ch[i] = (g0 + u * (g1 - g0)) * (d0 <= 1.0 ? ch[i] : filtered);
      }
    }
  }
  return out;
}

TrajectoryKey trajectory_at(const std::vector<TrajectoryKey>& tr, double t) {
  if (tr.empty()) throw std::invalid_argument("empty trajectory");
  if (t <= tr.front().time_s) return {t, tr.front().azimuth, tr.front().elevation, tr.front().distance};
  if (t >= tr.back().time_s) return {t, tr.back().azimuth, tr.back().elevation, tr.back().distance};
  const auto it = std::upper_bound(tr.begin(), tr.end(), t,
                                   [](double v, const TrajectoryKey& k) { return v < k.time_s; });
  const TrajectoryKey& b = *it;
  const TrajectoryKey& a = *(it - 1);
  const double u = (t - a.time_s) / (b.time_s - a.time_s);
  // Azimuth takes the short way round.
  double daz = b.azimuth - a.azimuth;
  if (daz > 180.0) daz -= 360.0;
  if (daz < -180.0) daz += 360.0;
  double az = a.azimuth + u * daz;
  if (az > 180.0) az -= 360.0;
  if (az < -180.0) az += 360.0;
  return {t, az, a.elevation + u * (b.elevation - a.elevation), a.distance + u * (b.distance - a.distance)};
}

DopplerResult doppler_shift(const AudioBuffer& buf, const std::vector<TrajectoryKey>& trajectory) {
  if (buf.channel_count() == 0) throw std::invalid_argument("doppler_shift of an empty buffer");
  if (trajectory.empty()) throw std::invalid_argument("doppler_shift needs a trajectory");
  const double rate = buf.sample_rate();
  const double in_end = static_cast<double>(buf.frames()) / rate;
  const double t_end = in_end + trajectory_at(trajectory, in_end).distance / kSpeedOfSound;
  const auto frames = static_cast<std::size_t>(std::ceil(t_end * rate)) + 4;

  // Distance is piecewise linear in tau; its slope is held outside the keyframes.
  const auto dist = [&](double tau) { return trajectory_at(trajectory, tau).distance; };
  const auto slope = [&](double tau) {
    if (trajectory.size() < 2 || tau < trajectory.front().time_s || tau >= trajectory.back().time_s) return 0.0;
    const auto it = std::upper_bound(trajectory.begin(), trajectory.end(), tau,
                                     [](double v, const TrajectoryKey& k) { return v < k.time_s; });
    return (it->distance - (it - 1)->distance) / (it->time_s - (it - 1)->time_s);
  };

  DopplerResult r;
  r.emission_time.resize(frames);
  double tau = -dist(0.0) / kSpeedOfSound;
  for (std::size_t n = 0; n < frames; ++n) {
    const double t = static_cast<double>(n) / rate;
    // Newton on f(tau) = tau + d(tau)/c - t; f' = 1 + d'(tau)/c > 0.
    for (int it = 0; it < 50; ++it) {
      const double f = tau + dist(tau) / kSpeedOfSound - t;
      const double step = f / (1.0 + slope(tau) / kSpeedOfSound);
      tau -= step;
      if (std::abs(step) < 1e-13) break;
    }
    r.emission_time[n] = tau;
  }
  std::vector<std::vector<double>> out(buf.channel_count(), std::vector<double>(frames, 0.0));
  for (std::size_t c = 0; c < buf.channel_count(); ++c) {
    const auto x = buf.channel(c);
    for (std::size_t n = 0; n < frames; ++n) out[c][n] = lagrange_read(x, r.emission_time[n] * rate);
  }
  r.audio = AudioBuffer(buf.sample_rate(), std::move(out));
  return r;
}

}  // namespace audiobook
