#include "audiobook/audio/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace audiobook {
namespace {

constexpr int kZeroCrossings = 32;
constexpr int kTableResolution = 512;
constexpr double kKaiserBeta = 9.0;
constexpr double kCutoffGuard = 0.97;

double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// Windowed sinc sampled at kTableResolution points per zero crossing, with
// one guard entry so linear interpolation never reads past the end.
const std::vector<double>& kernel_table() {
  static const std::vector<double> table = [] {
    const int n = kZeroCrossings * kTableResolution;
    std::vector<double> t(static_cast<std::size_t>(n) + 2, 0.0);
    const double norm = bessel_i0(kKaiserBeta);
    for (int i = 0; i <= n; ++i) {
      const double u = static_cast<double>(i) / kTableResolution;
      const double r = u / kZeroCrossings;
      const double sinc = i == 0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
      t[static_cast<std::size_t>(i)] = sinc * bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / norm;
    }
    return t;
  }();
  return table;
}

double kernel(double u) {
  u = std::abs(u);
  if (u >= kZeroCrossings) return 0.0;
  const auto& t = kernel_table();
  const double pos = u * kTableResolution;
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return t[i] + frac * (t[i + 1] - t[i]);
}

}  // namespace

AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample target rate must be positive");
  if (target_rate == buf.sample_rate()) return buf;
  const double ratio = static_cast<double>(target_rate) / buf.sample_rate();
  const std::size_t n = buf.frames();
  const auto out_len = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));
  const double cutoff = std::min(1.0, ratio) * kCutoffGuard;
  const double half_width = kZeroCrossings / cutoff;
  std::vector<std::vector<double>> out(buf.channel_count(), std::vector<double>(out_len, 0.0));
  std::vector<double> weights;
  for (std::size_t k = 0; k < out_len; ++k) {
    const double t = static_cast<double>(k) / ratio;
    const auto lo = static_cast<long long>(std::ceil(t - half_width));
    const auto hi = static_cast<long long>(std::floor(t + half_width));
    const long long first = std::max<long long>(lo, 0);
    const long long last = std::min<long long>(hi, static_cast<long long>(n) - 1);
    weights.clear();
    for (long long i = first; i <= last; ++i) {
      weights.push_back(cutoff * kernel((t - static_cast<double>(i)) * cutoff));
    }
    for (std::size_t c = 0; c < buf.channel_count(); ++c) {
      const auto src = buf.channel(c);
      double acc = 0.0;
      for (long long i = first; i <= last; ++i) {
        acc += weights[static_cast<std::size_t>(i - first)] * src[static_cast<std::size_t>(i)];
      }
      out[c][k] = acc;
    }
  }
  return AudioBuffer(target_rate, std::move(out));
}

AudioBuffer mixdown_mono(const AudioBuffer& buf) {
  std::vector<double> m(buf.frames(), 0.0);
  const std::size_t cc = buf.channel_count();
  if (cc == 0) return AudioBuffer::mono(buf.sample_rate(), {});
  for (std::size_t c = 0; c < cc; ++c) {
    const auto ch = buf.channel(c);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += ch[i];
  }
  for (double& s : m) s /= static_cast<double>(cc);
  return AudioBuffer::mono(buf.sample_rate(), std::move(m));
}

}  // namespace audiobook
