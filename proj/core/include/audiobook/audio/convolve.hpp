#pragma once

#include <span>
#include <vector>

#include "audiobook/audio/buffer.hpp"

namespace audiobook {

// Linear convolution, output length len(x) + len(h) - 1. Short kernels are
// summed directly; longer ones go through uniformly partitioned FFT
// overlap-add with partitions of at most 8192 taps.
std::vector<double> convolve(std::span<const double> x, std::span<const double> h);

// Channel mapping: a mono IR is applied to every input channel; an IR with
// as many channels as the input is applied channel-wise; a mono input
// convolved with a multichannel IR yields one output channel per IR channel.
// Throws std::invalid_argument on sample-rate or channel mismatch.
AudioBuffer convolve(const AudioBuffer& x, const ImpulseResponse& h);

}  // namespace audiobook
