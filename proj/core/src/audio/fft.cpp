#include "audiobook/audio/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace audiobook {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

FftPlan::FftPlan(std::size_t n) : n_(n), twiddles_(n / 2), bitrev_(n) {
  if (!is_power_of_two(n)) throw std::invalid_argument("FFT size must be a power of two");
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(a), std::sin(a)};
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    bitrev_[i] = r;
  }
}

void FftPlan::run(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != n_) throw std::invalid_argument("FFT input size does not match plan");
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = twiddles_[k * stride];
        if (inverse) w = std::conj(w);
        const std::complex<double> u = data[start + k];
        const std::complex<double> v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& z : data) z *= scale;
  }
}

void fft_inplace(std::span<std::complex<double>> data, bool inverse) {
  FftPlan plan(data.size());
  if (inverse) {
    plan.inverse(data);
  } else {
    plan.forward(data);
  }
}

Spectrum dft(std::span<const double> frame, int sample_rate) {
  if (frame.empty()) throw std::invalid_argument("dft of an empty frame");
  if (!is_power_of_two(frame.size())) {
    throw std::invalid_argument("dft frame length must be a power of two");
  }
  std::vector<std::complex<double>> work(frame.begin(), frame.end());
  fft_inplace(work);
  Spectrum s;
  s.frame_size = frame.size();
  s.sample_rate = sample_rate;
  s.bins.assign(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(frame.size() / 2 + 1));
  return s;
}

std::vector<double> idft(const Spectrum& spectrum) {
  const std::size_t n = spectrum.frame_size;
  if (n == 0 || spectrum.bins.size() != n / 2 + 1) {
    throw std::invalid_argument("spectrum does not hold a half spectrum");
  }
  std::vector<std::complex<double>> work(n);
  for (std::size_t k = 0; k <= n / 2; ++k) work[k] = spectrum.bins[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k) work[k] = std::conj(spectrum.bins[n - k]);
  fft_inplace(work, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = work[i].real();
  return out;
}

std::vector<double> zero_pad_to_pow2(std::span<const double> frame) {
  std::vector<double> out(frame.begin(), frame.end());
  out.resize(next_power_of_two(std::max<std::size_t>(frame.size(), 1)), 0.0);
  return out;
}

}  // namespace audiobook
