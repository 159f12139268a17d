#include "audiobook/mixer/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "audiobook/util/parallel.hpp"

namespace audiobook {
namespace {

AudioBuffer to_stereo(const AudioBuffer& buf) {
  if (buf.channel_count() == 2) return buf;
  if (buf.channel_count() != 1) throw std::invalid_argument("expected mono or stereo audio");
  auto ch = buf.channel(0);
  std::vector<double> m(ch.begin(), ch.end());
  return AudioBuffer(buf.sample_rate(), {m, m});
}

double frame_peak(const AudioBuffer& buf, std::size_t i) {
  double p = 0.0;
  for (std::size_t c = 0; c < buf.channel_count(); ++c) p = std::max(p, std::abs(buf.channel(c)[i]));
  return p;
}

}  // namespace

double db_to_gain(double db) { return std::pow(10.0, db / 20.0); }

double gain_to_db(double gain) {
  if (!(gain > 0.0)) return kSilenceFloorDb;
  return std::max(20.0 * std::log10(gain), kSilenceFloorDb);
}

LoudnessStats measure_loudness(const AudioBuffer& buf) {
  if (buf.empty()) throw std::invalid_argument("measure_loudness: empty buffer");
  double sum = 0.0, peak = 0.0;
  std::size_t n = 0;
  for (const auto& ch : buf.channels()) {
    for (double v : ch) {
      sum += v * v;
      peak = std::max(peak, std::abs(v));
    }
    n += ch.size();
  }
  return {gain_to_db(std::sqrt(sum / static_cast<double>(n))), gain_to_db(peak)};
}

double automation_gain(const std::vector<GainKey>& keys, double t) {
  if (keys.empty()) return 1.0;
  if (t <= keys.front().time_s) return keys.front().gain;
  if (t >= keys.back().time_s) return keys.back().gain;
  auto hi = std::upper_bound(keys.begin(), keys.end(), t, [](double v, const GainKey& k) { return v < k.time_s; });
  auto lo = hi - 1;
  const double u = (t - lo->time_s) / (hi->time_s - lo->time_s);
  return lo->gain + u * (hi->gain - lo->gain);
}

void MixPlan::validate() const {
  if (!(narration_gain >= 0.0) || !std::isfinite(narration_gain)) throw std::invalid_argument("mix plan: narration gain must be >= 0");
  if (!(targets.ceiling_db <= 0.0)) throw std::invalid_argument("mix plan: ceiling must be <= 0 dB");
  std::set<std::string> ids;
  for (const auto& l : layers) {
    if (!ids.insert(l.cue_id).second) throw std::invalid_argument("mix plan: duplicate layer '" + l.cue_id + "'");
    if (!(l.onset_s >= 0.0) || !std::isfinite(l.onset_s)) throw std::invalid_argument("mix plan: layer '" + l.cue_id + "' onset must be >= 0");
    for (std::size_t k = 0; k < l.automation.size(); ++k) {
      if (!(l.automation[k].gain >= 0.0) || !std::isfinite(l.automation[k].gain)) {
        throw std::invalid_argument("mix plan: layer '" + l.cue_id + "' has a negative gain");
      }
      if (k > 0 && !(l.automation[k].time_s > l.automation[k - 1].time_s)) {
        throw std::invalid_argument("mix plan: layer '" + l.cue_id + "' keyframe times must increase");
      }
    }
  }
}

AudioBuffer mix_layers(const MixPlan& plan, const AudioBuffer& narration, const std::map<std::string, AudioBuffer>& layers,
                       int threads) {
  plan.validate();
  const int rate = narration.sample_rate();
  const std::size_t base = narration.frames();
  const auto guard = static_cast<std::size_t>(std::llround(kLayerGuardS * rate));

  std::vector<const LayerPlan*> order;
  for (const auto& l : plan.layers) order.push_back(&l);
  std::sort(order.begin(), order.end(), [](const LayerPlan* a, const LayerPlan* b) { return a->cue_id < b->cue_id; });

  std::vector<std::size_t> starts(order.size());
  std::size_t total = base;
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto it = layers.find(order[k]->cue_id);
    if (it == layers.end()) throw std::invalid_argument("mix_layers: no audio for layer '" + order[k]->cue_id + "'");
    if (it->second.sample_rate() != rate) throw std::invalid_argument("mix_layers: layer '" + order[k]->cue_id + "' has a different rate");
    starts[k] = static_cast<std::size_t>(std::llround(order[k]->onset_s * rate));
    const std::size_t end = starts[k] + it->second.frames();
    if (end > base + guard) {
      throw std::invalid_argument("mix_layers: layer '" + order[k]->cue_id + "' ends more than " +
                                  std::to_string(static_cast<int>(kLayerGuardS)) + " s past the narration");
    }
    total = std::max(total, end);
  }

  // Per-layer gain application is independent; the sum below runs in a
  // fixed order, so the result does not depend on the thread count.
  std::vector<AudioBuffer> gained(order.size());
  std::vector<std::vector<bool>> silent(order.size());
  parallel_for(order.size(), threads, [&](std::size_t k) {
    AudioBuffer b = to_stereo(layers.at(order[k]->cue_id));
    std::vector<bool> zero(b.frames());
    for (std::size_t i = 0; i < b.frames(); ++i) {
      const double g = automation_gain(order[k]->automation, static_cast<double>(i) / rate);
      zero[i] = g == 0.0;
      for (std::size_t c = 0; c < 2; ++c) b.channel(c)[i] *= g;
    }
    gained[k] = std::move(b);
    silent[k] = std::move(zero);
  });

  AudioBuffer out = to_stereo(narration);
  if (plan.narration_gain != 1.0) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (double& v : out.channel(c)) v *= plan.narration_gain;
    }
  }
  out.resize_frames(total);
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t c = 0; c < 2; ++c) {
      auto dst = out.channel(c);
      auto src = gained[k].channel(c);
      for (std::size_t i = 0; i < src.size(); ++i) {
        if (!silent[k][i]) dst[starts[k] + i] += src[i];
      }
    }
  }
  return out;
}

AudioBuffer duck(const AudioBuffer& bg, const FeatureSeries& fg_envelope, const DuckOptions& options) {
  if (!(options.depth_db <= 0.0)) throw std::invalid_argument("duck: depth must be <= 0 dB");
  if (!(options.attack_ms > 0.0 && options.release_ms > 0.0)) throw std::invalid_argument("duck: attack and release must be positive");
  fg_envelope.validate();
  const int rate = bg.sample_rate();
  const double a_att = 1.0 - std::exp(-1.0 / (options.attack_ms * 1e-3 * rate));
  const double a_rel = 1.0 - std::exp(-1.0 / (options.release_ms * 1e-3 * rate));
  const double low = db_to_gain(options.depth_db);
  AudioBuffer out = bg;
  double g = 1.0;
  for (std::size_t i = 0; i < bg.frames(); ++i) {
    const auto k = static_cast<std::size_t>(static_cast<double>(i) / rate / fg_envelope.hop_s);
    const bool active = k < fg_envelope.values.size() && fg_envelope.values[k] > options.threshold_db;
    const double target = active ? low : 1.0;
    g += (target < g ? a_att : a_rel) * (target - g);
    if (g == 1.0) continue;
    for (std::size_t c = 0; c < out.channel_count(); ++c) out.channel(c)[i] *= g;
  }
  return out;
}

LimitResult limit_with_gain(const AudioBuffer& buf, double ceiling_db) {
  if (!(ceiling_db <= 0.0)) throw std::invalid_argument("limit: ceiling must be <= 0 dB");
  const double ceiling = db_to_gain(ceiling_db);
  const std::size_t n = buf.frames();
  std::vector<double> need(n, 1.0);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = frame_peak(buf, i);
    if (p > ceiling) {
      need[i] = ceiling / p;
      any = true;
    }
  }
  if (!any) return {buf, {}};

  const int rate = buf.sample_rate();
  const auto look = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(kLimiterLookaheadS * rate)));
  // Attack envelope: reach need[m] at m along a straight line from unity
  // that starts `look` frames earlier.
  std::vector<double> attack(n, 1.0);
  for (std::size_t m = 0; m < n; ++m) {
    if (need[m] >= 1.0) continue;
    const std::size_t first = m >= look ? m - look : 0;
    for (std::size_t j = first; j <= m; ++j) {
      const double v = need[m] + (1.0 - need[m]) * static_cast<double>(m - j) / static_cast<double>(look);
      attack[j] = std::min(attack[j], v);
    }
  }
  const double a_rel = 1.0 - std::exp(-1.0 / (kLimiterReleaseS * rate));
  LimitResult r{buf, std::vector<double>(n)};
  double g = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    g = std::min(attack[i], g + a_rel * (1.0 - g));
    r.gain[i] = g;
    for (std::size_t c = 0; c < buf.channel_count(); ++c) {
      double& v = r.audio.channel(c)[i];
      v *= g;
      // g <= ceiling / peak, so this only trims rounding in the product.
      if (std::abs(v) > ceiling) v = std::copysign(ceiling, v);
    }
  }
  return r;
}

AudioBuffer limit(const AudioBuffer& buf, double ceiling_db) { return limit_with_gain(buf, ceiling_db).audio; }

AudioBuffer apply_profile(const AudioBuffer& buf, PlaybackMode profile) {
  if (profile == PlaybackMode::kBinaural) return buf;
  AudioBuffer out = to_stereo(buf);
  const double side_gain = db_to_gain(-3.0);
  auto l = out.channel(0);
  auto r = out.channel(1);
  for (std::size_t i = 0; i < out.frames(); ++i) {
    const double mid = 0.5 * (l[i] + r[i]);
    const double side = 0.5 * (l[i] - r[i]) * side_gain;
    l[i] = mid + side;
    r[i] = mid - side;
  }
  return out;
}

MasterResult master(const MixPlan& plan, const AudioBuffer& mixed, const AudioBuffer& narration_solo) {
  plan.validate();
  const AudioBuffer shaped = apply_profile(mixed, plan.profile);
  const AudioBuffer solo = apply_profile(to_stereo(narration_solo), plan.profile);
  MasterResult result;
  const double solo_db = measure_loudness(solo).rms_db;
  result.gain = solo_db > kSilenceFloorDb ? db_to_gain(plan.targets.narration_rms_db - solo_db) : 1.0;
  AudioBuffer scaled = shaped;
  if (result.gain != 1.0) {
    for (std::size_t c = 0; c < scaled.channel_count(); ++c) {
      for (double& v : scaled.channel(c)) v *= result.gain;
    }
  }
  auto limited = limit_with_gain(scaled, plan.targets.ceiling_db);
  result.audio = std::move(limited.audio);
  result.limiter_gain = std::move(limited.gain);
  return result;
}

}  // namespace audiobook
