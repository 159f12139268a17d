#include "audiobook/temporal/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "audiobook/audio/fft.hpp"
#include "audiobook/audio/resample.hpp"

namespace audiobook {
namespace {

std::vector<double> mono_samples(const AudioBuffer& buf) {
  if (buf.channel_count() == 1) {
    auto ch = buf.channel(0);
    return {ch.begin(), ch.end()};
  }
  auto mono = mixdown_mono(buf);
  auto ch = mono.channel(0);
  return {ch.begin(), ch.end()};
}

// Reflect without repeating the edge: -1 -> 1, n -> n - 2.
std::size_t reflect(long long i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<long long>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < static_cast<long long>(n) ? i : period - i);
}

std::vector<double> smooth_line(const std::vector<double>& line, const std::vector<double>& kernel) {
  const auto half = static_cast<long long>(kernel.size() / 2);
  std::vector<double> out(line.size(), 0.0);
  for (std::size_t i = 0; i < line.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      acc += kernel[k] * line[reflect(static_cast<long long>(i) + static_cast<long long>(k) - half, line.size())];
    }
    out[i] = acc;
  }
  return out;
}

double dtft_magnitude(const std::vector<double>& windowed, double freq, int rate) {
  // Recurrence on the unit phasor keeps this O(n) without per-sample trig;
  // it is renormalized every block to stop drift.
  const double w = -2.0 * std::numbers::pi * freq / rate;
  const std::complex<double> step(std::cos(w), std::sin(w));
  std::complex<double> phasor(1.0, 0.0), acc(0.0, 0.0);
  for (std::size_t n = 0; n < windowed.size(); ++n) {
    if (n % 1024 == 0) phasor = std::polar(1.0, w * static_cast<double>(n));
    acc += windowed[n] * phasor;
    phasor *= step;
  }
  return std::abs(acc);
}

}  // namespace

TfGrid spectrogram(const AudioBuffer& buf, std::size_t frame, std::size_t hop) {
  if (!is_power_of_two(frame)) throw std::invalid_argument("spectrogram: frame must be a power of two");
  if (hop == 0 || hop > frame) throw std::invalid_argument("spectrogram: hop must be in 1..frame");
  if (buf.frames() < frame) throw std::invalid_argument("spectrogram: buffer shorter than one frame");
  const auto x = mono_samples(buf);
  std::vector<double> window(frame);
  for (std::size_t n = 0; n < frame; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(frame));
  }
  const FftPlan plan(frame);
  const std::size_t count = (x.size() - frame) / hop + 1;
  TfGrid grid;
  grid.cells.reserve(count);
  std::vector<std::complex<double>> work(frame);
  for (std::size_t f = 0; f < count; ++f) {
    for (std::size_t n = 0; n < frame; ++n) work[n] = x[f * hop + n] * window[n];
    plan.forward(work);
    std::vector<double> mags(frame / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) mags[k] = std::abs(work[k]);
    grid.cells.push_back(std::move(mags));
  }
  return grid;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  const auto half = static_cast<std::size_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double t = static_cast<double>(i) - static_cast<double>(half);
    k[i] = std::exp(-0.5 * t * t / (sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

TfGrid spectrotemporal_filter(const TfGrid& grid, double sigma_f, double sigma_t) {
  const auto kf = gaussian_kernel(sigma_f);
  const auto kt = gaussian_kernel(sigma_t);
  TfGrid out = grid;
  if (grid.frames() == 0) return out;
  for (auto& row : out.cells) row = smooth_line(row, kf);
  std::vector<double> column(out.frames());
  for (std::size_t b = 0; b < out.bins(); ++b) {
    for (std::size_t t = 0; t < out.frames(); ++t) column[t] = out.cells[t][b];
    const auto smoothed = smooth_line(column, kt);
    for (std::size_t t = 0; t < out.frames(); ++t) out.cells[t][b] = smoothed[t];
  }
  return out;
}

FeatureSeries energy_envelope(const AudioBuffer& buf, double hop_s, double window_s, bool normalize, double floor_db) {
  if (!(hop_s > 0.0) || !(window_s > 0.0)) throw std::invalid_argument("energy_envelope: hop and window must be positive");
  const auto x = mono_samples(buf);
  const int rate = buf.sample_rate();
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hop_s * rate)));
  const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window_s * rate)));
  FeatureSeries env;
  env.hop_s = static_cast<double>(hop) / rate;
  const std::size_t count = x.empty() ? 0 : (x.size() + hop - 1) / hop;
  env.values.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    double acc = 0.0;
    const std::size_t end = std::min(x.size(), k * hop + win);
    for (std::size_t i = k * hop; i < end; ++i) acc += x[i] * x[i];
    const double ms = acc / static_cast<double>(win);
    env.values.push_back(ms > 0.0 ? 10.0 * std::log10(ms) : -std::numeric_limits<double>::infinity());
  }
  double top = 0.0;
  if (normalize && !env.values.empty()) top = *std::max_element(env.values.begin(), env.values.end());
  if (!std::isfinite(top)) top = 0.0;
  for (double& v : env.values) v = std::max(v - top, floor_db);
  return env;
}

double tmtf(const AudioBuffer& buf, double f_m, double f_c) {
  const int rate = buf.sample_rate();
  const double nyquist = rate / 2.0;
  if (!(f_m > 0.0 && f_m < f_c && f_c + f_m < nyquist)) {
    throw std::invalid_argument("tmtf: need 0 < f_m < f_c and f_c + f_m below Nyquist");
  }
  const auto x = mono_samples(buf);
  const double duration = static_cast<double>(x.size()) / rate;
  // Blackman-Harris main lobe is 4 bins wide on each side.
  if (f_m * duration < 4.0) throw std::invalid_argument("tmtf: carrier and sideband bins collide");
  constexpr double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
  std::vector<double> windowed(x.size());
  const double denom = static_cast<double>(x.size() - 1);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double p = 2.0 * std::numbers::pi * static_cast<double>(n) / denom;
    windowed[n] = x[n] * (a0 - a1 * std::cos(p) + a2 * std::cos(2 * p) - a3 * std::cos(3 * p));
  }
  const double carrier = dtft_magnitude(windowed, f_c, rate);
  const double side = dtft_magnitude(windowed, f_c + f_m, rate);
  constexpr double kFloorDb = -120.0;
  if (carrier <= 0.0) return kFloorDb;
  if (side <= 0.0) return kFloorDb;
  return std::max(20.0 * std::log10(side / carrier), kFloorDb);
}

FeatureSeries multiscale_integrate(const FeatureSeries& f_s, const FeatureSeries& f_l, double w_s, double w_l) {
  if (!(w_s >= 0.0 && w_l >= 0.0) || std::abs(w_s + w_l - 1.0) > 1e-12) {
    throw std::invalid_argument("multiscale_integrate: weights must be non-negative and sum to 1");
  }
  f_s.validate();
  f_l.validate();
  if (f_l.values.empty() && w_l > 0.0) throw std::invalid_argument("multiscale_integrate: empty long-window series");
  FeatureSeries out;
  out.hop_s = f_s.hop_s;
  out.values.resize(f_s.values.size());
  for (std::size_t k = 0; k < f_s.values.size(); ++k) {
    double long_value = 0.0;
    if (!f_l.values.empty()) {
      const double pos = std::clamp(static_cast<double>(k) * f_s.hop_s / f_l.hop_s, 0.0,
                                    static_cast<double>(f_l.values.size() - 1));
      const auto lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, f_l.values.size() - 1);
      const double u = pos - static_cast<double>(lo);
      long_value = f_l.values[lo] + u * (f_l.values[hi] - f_l.values[lo]);
    }
    out.values[k] = w_s * f_s.values[k] + w_l * long_value;
  }
  return out;
}

}  // namespace audiobook
