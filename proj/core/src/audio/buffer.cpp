#include "audiobook/audio/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace audiobook {

AudioBuffer::AudioBuffer(int sample_rate, std::size_t channels, std::size_t frames)
    : sample_rate_(sample_rate), data_(channels, std::vector<double>(frames, 0.0)) {
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
}

AudioBuffer::AudioBuffer(int sample_rate, std::vector<std::vector<double>> channels)
    : sample_rate_(sample_rate), data_(std::move(channels)) {
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
  for (const auto& ch : data_) {
    if (ch.size() != data_.front().size()) {
      throw std::invalid_argument("channels must have equal length");
    }
  }
}

AudioBuffer AudioBuffer::mono(int sample_rate, std::vector<double> samples) {
  std::vector<std::vector<double>> chans;
  chans.push_back(std::move(samples));
  return AudioBuffer(sample_rate, std::move(chans));
}

double AudioBuffer::duration_s() const {
  return static_cast<double>(frames()) / static_cast<double>(sample_rate_);
}

void AudioBuffer::resize_frames(std::size_t frames) {
  for (auto& ch : data_) ch.resize(frames, 0.0);
}

bool AudioBuffer::all_finite() const {
  for (const auto& ch : data_) {
    for (double s : ch) {
      if (!std::isfinite(s)) return false;
    }
  }
  return true;
}

double AudioBuffer::peak() const {
  double p = 0.0;
  for (const auto& ch : data_) {
    for (double s : ch) p = std::max(p, std::abs(s));
  }
  return p;
}

ImpulseResponse::ImpulseResponse(int rate, std::vector<double> mono_taps)
    : sample_rate(rate) {
  taps.push_back(std::move(mono_taps));
}

ImpulseResponse::ImpulseResponse(int rate, std::vector<std::vector<double>> channel_taps)
    : sample_rate(rate), taps(std::move(channel_taps)) {}

void ImpulseResponse::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("impulse response rate must be positive");
  if (taps.empty() || taps.front().empty()) {
    throw std::invalid_argument("impulse response is empty");
  }
  for (const auto& ch : taps) {
    if (ch.size() != taps.front().size()) {
      throw std::invalid_argument("impulse response channels differ in length");
    }
    for (double t : ch) {
      if (!std::isfinite(t)) throw std::invalid_argument("impulse response has non-finite taps");
    }
  }
}

}  // namespace audiobook
