#include "audiobook/audio/convolve.hpp"

#include <algorithm>
#include <complex>
#include <stdexcept>

#include "audiobook/audio/fft.hpp"

namespace audiobook {
namespace {

constexpr std::size_t kDirectLimit = 32;
constexpr std::size_t kMaxPartition = 8192;

std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < h.size(); ++j) y[i + j] += xi * h[j];
  }
  return y;
}

using Block = std::vector<std::complex<double>>;

std::vector<Block> partition_spectra(std::span<const double> s, std::size_t block,
                                     const FftPlan& plan) {
  const std::size_t count = (s.size() + block - 1) / block;
  std::vector<Block> out(count);
  for (std::size_t p = 0; p < count; ++p) {
    Block b(plan.size());
    const std::size_t begin = p * block;
    const std::size_t end = std::min(s.size(), begin + block);
    for (std::size_t i = begin; i < end; ++i) b[i - begin] = s[i];
    plan.forward(b);
    out[p] = std::move(b);
  }
  return out;
}

// Uniformly partitioned overlap-add. Both signals are cut into blocks of B
// samples; every product of an input block and a kernel block lands at
// output block p + q, so products are accumulated per output block in the
// frequency domain and inverse transformed once.
std::vector<double> convolve_partitioned(std::span<const double> x, std::span<const double> h) {
  const std::size_t block = std::min(kMaxPartition, next_power_of_two(h.size()));
  const FftPlan plan(2 * block);
  const auto hs = partition_spectra(h, block, plan);
  const auto xs = partition_spectra(x, block, plan);
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  Block acc(plan.size());
  const std::size_t outputs = xs.size() + hs.size() - 1;
  for (std::size_t j = 0; j < outputs; ++j) {
    std::fill(acc.begin(), acc.end(), std::complex<double>{});
    const std::size_t q_lo = j >= hs.size() ? j - hs.size() + 1 : 0;
    const std::size_t q_hi = std::min(j, xs.size() - 1);
    for (std::size_t q = q_lo; q <= q_hi; ++q) {
      const Block& a = xs[q];
      const Block& b = hs[j - q];
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += a[k] * b[k];
    }
    plan.inverse(acc);
    const std::size_t base = j * block;
    const std::size_t end = std::min(y.size(), base + acc.size());
    for (std::size_t i = base; i < end; ++i) y[i] += acc[i - base].real();
  }
  return y;
}

}  // namespace

std::vector<double> convolve(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) throw std::invalid_argument("convolve of an empty sequence");
  if (std::min(x.size(), h.size()) <= kDirectLimit) return convolve_direct(x, h);
  return convolve_partitioned(x, h);
}

AudioBuffer convolve(const AudioBuffer& x, const ImpulseResponse& h) {
  h.validate();
  if (x.sample_rate() != h.sample_rate) {
    throw std::invalid_argument("convolve: sample rate mismatch");
  }
  if (x.channel_count() == 0 || x.frames() == 0) {
    throw std::invalid_argument("convolve: empty input buffer");
  }
  const std::size_t xc = x.channel_count();
  const std::size_t hc = h.channel_count();
  std::vector<std::vector<double>> out;
  if (hc == 1) {
    for (std::size_t c = 0; c < xc; ++c) out.push_back(convolve(x.channel(c), h.taps[0]));
  } else if (hc == xc) {
    for (std::size_t c = 0; c < xc; ++c) out.push_back(convolve(x.channel(c), h.taps[c]));
  } else if (xc == 1) {
    for (std::size_t c = 0; c < hc; ++c) out.push_back(convolve(x.channel(0), h.taps[c]));
  } else {
    throw std::invalid_argument("convolve: incompatible channel counts");
  }
  return AudioBuffer(x.sample_rate(), std::move(out));
}

}  // namespace audiobook
