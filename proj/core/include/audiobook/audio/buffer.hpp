#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace audiobook {

// All processing runs at this rate; assets are resampled on load.
inline constexpr int kCanonicalRate = 48000;

// Planar PCM in double precision. Every channel holds the same number of
// frames. A default-constructed buffer has no channels and acts as "empty".
class AudioBuffer {
 public:
  AudioBuffer() = default;
  AudioBuffer(int sample_rate, std::size_t channels, std::size_t frames);
  AudioBuffer(int sample_rate, std::vector<std::vector<double>> channels);

  static AudioBuffer mono(int sample_rate, std::vector<double> samples);

  int sample_rate() const { return sample_rate_; }
  std::size_t channel_count() const { return data_.size(); }
  std::size_t frames() const { return data_.empty() ? 0 : data_.front().size(); }
  double duration_s() const;
  bool empty() const { return frames() == 0; }

  std::span<double> channel(std::size_t c) { return data_.at(c); }
  std::span<const double> channel(std::size_t c) const { return data_.at(c); }
  const std::vector<std::vector<double>>& channels() const { return data_; }

  // Grows or shrinks every channel; new frames are zero.
  void resize_frames(std::size_t frames);

  bool all_finite() const;
  double peak() const;

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  int sample_rate_ = kCanonicalRate;
  std::vector<std::vector<double>> data_;
};

// FIR impulse response, one tap sequence per channel.
struct ImpulseResponse {
  int sample_rate = kCanonicalRate;
  std::vector<std::vector<double>> taps;

  ImpulseResponse() = default;
  ImpulseResponse(int rate, std::vector<double> mono_taps);
  ImpulseResponse(int rate, std::vector<std::vector<double>> channel_taps);

  std::size_t length() const { return taps.empty() ? 0 : taps.front().size(); }
  std::size_t channel_count() const { return taps.size(); }
  // Throws std::invalid_argument on empty, ragged or non-finite taps.
  void validate() const;
};

// Half spectrum of a real frame: frame_size / 2 + 1 bins.
struct Spectrum {
  std::vector<std::complex<double>> bins;
  std::size_t frame_size = 0;
  int sample_rate = kCanonicalRate;

  double bin_hz() const {
    return static_cast<double>(sample_rate) / static_cast<double>(frame_size);
  }
};

}  // namespace audiobook
