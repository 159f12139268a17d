#pragma once

#include <cstddef>
#include <vector>

#include "audiobook/audio/buffer.hpp"
#include "audiobook/temporal/dtw.hpp"

namespace audiobook {

// Time-frequency magnitudes, cells[frame][bin], bins 0..frame/2.
struct TfGrid {
  std::vector<std::vector<double>> cells;

  std::size_t frames() const { return cells.size(); }
  std::size_t bins() const { return cells.empty() ? 0 : cells.front().size(); }
};

// Hann-windowed magnitude frames of a mono buffer (multichannel input is
// mixed down). frame must be a power of two and hop in 1..frame.
TfGrid spectrogram(const AudioBuffer& buf, std::size_t frame, std::size_t hop);

// Sampled Gaussian truncated at 3 sigma (at least the centre tap) and
// normalized to sum 1. Length 2 * ceil(3 sigma) + 1.
std::vector<double> gaussian_kernel(double sigma);

// Separable Gaussian smoothing along bins (sigma_f) and frames (sigma_t)
// with reflect padding; output has the input's shape.
TfGrid spectrotemporal_filter(const TfGrid& grid, double sigma_f, double sigma_t);

// Log-energy envelope in dB: RMS over `window_s` windows every `hop_s`,
// floored at floor_db. With normalize, 0 dB is the loudest window.
FeatureSeries energy_envelope(const AudioBuffer& buf, double hop_s, double window_s, bool normalize = true,
                              double floor_db = -60.0);

// Amplitude-modulation transfer: 20 log10(|X(f_c + f_m)| / |X(f_c)|) in dB,
// both magnitudes read at the exact frequencies from a Blackman-Harris
// windowed transform of the whole buffer. Floored at -120 dB.
double tmtf(const AudioBuffer& buf, double f_m, double f_c);

inline constexpr double kShortWindowS = 0.05;
inline constexpr double kLongWindowS = 0.4;

// w_s F_s + w_l F_l with F_l linearly resampled onto F_s's hop and length.
FeatureSeries multiscale_integrate(const FeatureSeries& f_s, const FeatureSeries& f_l, double w_s, double w_l);

}  // namespace audiobook
