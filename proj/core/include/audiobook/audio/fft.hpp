#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "audiobook/audio/buffer.hpp"

namespace audiobook {

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

// In-place radix-2 transform. Length must be a power of two. The inverse
// is scaled by 1/n so fft followed by ifft is the identity.
void fft_inplace(std::span<std::complex<double>> data, bool inverse = false);

// Real-input DFT returning the half spectrum. Frames must be a nonzero
// power of two long; callers that need other lengths pad explicitly with
// zero_pad_to_pow2().
Spectrum dft(std::span<const double> frame, int sample_rate = kCanonicalRate);

// Inverse of dft(): reconstructs the real frame of spectrum.frame_size.
std::vector<double> idft(const Spectrum& spectrum);

std::vector<double> zero_pad_to_pow2(std::span<const double> frame);

}  // namespace audiobook

namespace audiobook {

// Precomputed twiddles and bit-reversal table for one transform size.
// Immutable after construction, so a plan can be shared between threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  std::size_t size() const { return n_; }
  void forward(std::span<std::complex<double>> data) const { run(data, false); }
  // Scaled by 1/n.
  void inverse(std::span<std::complex<double>> data) const { run(data, true); }

 private:
  void run(std::span<std::complex<double>> data, bool inverse) const;
  std::size_t n_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bitrev_;
};

}  // namespace audiobook
