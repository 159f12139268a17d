#include <audiobook/audio/buffer.hpp>
#include <audiobook/audio/convolve.hpp>
#include <audiobook/audio/fft.hpp>
#include <audiobook/audio/resample.hpp>
#include <audiobook/audio/wav.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace audiobook;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Wav, SilentPcm16ReadsAsZeros) {
  fixtures::TempDir dir("wav");
  const auto path = dir.path() / "zero.wav";
  write_wav(AudioBuffer(48000, 1, 48000), path, WavFormat::kPcm16);
  const AudioBuffer back = read_wav(path);
  EXPECT_EQ(back.sample_rate(), 48000);
  ASSERT_EQ(back.channel_count(), 1u);
  ASSERT_EQ(back.frames(), 48000u);
  for (double v : back.channel(0)) ASSERT_EQ(v, 0.0);
}

TEST(Wav, Pcm16FullScaleScalesBy32768) {
  // 44-byte canonical header followed by a single sample 0x7FFF.
  std::vector<std::uint8_t> bytes = {'R', 'I', 'F', 'F', 38, 0, 0, 0, 'W', 'A', 'V', 'E', 'f', 'm', 't', ' ',
                                     16, 0, 0, 0, 1, 0, 1, 0, 0x80, 0xBB, 0, 0, 0, 0x77, 1, 0, 2, 0, 16, 0,
                                     'd', 'a', 't', 'a', 2, 0, 0, 0, 0xFF, 0x7F};
  const AudioBuffer b = decode_wav(bytes);
  ASSERT_EQ(b.frames(), 1u);
  EXPECT_EQ(b.channel(0)[0], 32767.0 / 32768.0);
}

TEST(Wav, Float32RoundTripIsBitwise) {
  const auto noise = oracle::white_noise(4000, 11, 0.9);
  std::vector<double> quantized;
  for (double v : noise) quantized.push_back(static_cast<double>(static_cast<float>(v)));
  const AudioBuffer buf(48000, {quantized, std::vector<double>(quantized.rbegin(), quantized.rend())});
  fixtures::TempDir dir("wav");
  write_wav(buf, dir.path() / "f.wav", WavFormat::kFloat32);
  EXPECT_EQ(read_wav(dir.path() / "f.wav"), buf);
}

TEST(Wav, Pcm16HalfIsWithinOneStep) {
  const AudioBuffer back = decode_wav(encode_wav(AudioBuffer::mono(48000, {0.5, -0.5}), WavFormat::kPcm16));
  EXPECT_LE(std::fabs(back.channel(0)[0] - 0.5), 1.0 / 32768.0);
  EXPECT_LE(std::fabs(back.channel(0)[1] + 0.5), 1.0 / 32768.0);
}

TEST(Wav, Pcm24RoundTripWithinQuantization) {
  const auto noise = oracle::white_noise(1000, 3, 0.99);
  const AudioBuffer back = decode_wav(encode_wav(AudioBuffer::mono(44100, noise), WavFormat::kPcm24));
  EXPECT_EQ(back.sample_rate(), 44100);
  EXPECT_LE(max_abs_diff(as_vector(back.channel(0)), noise), 1.0 / 8388608.0);
}

TEST(Wav, MissingDirectoryIsIoError) {
  try {
    write_wav(AudioBuffer::mono(48000, {0.0}), "/nonexistent-dir-for-test/x.wav");
    FAIL() << "expected WavError";
  } catch (const WavError& e) {
    EXPECT_EQ(e.kind(), WavErrorKind::kIo);
  }
}

TEST(Wav, PcmRejectsOutOfRangeSamples) {
  try {
    encode_wav(AudioBuffer::mono(48000, {0.2, 1.5}), WavFormat::kPcm16);
    FAIL() << "expected WavError";
  } catch (const WavError& e) {
    EXPECT_EQ(e.kind(), WavErrorKind::kSampleOutOfRange);
  }
  // Float output carries the value unchanged.
  EXPECT_NO_THROW(encode_wav(AudioBuffer::mono(48000, {1.5}), WavFormat::kFloat32));
}

TEST(Wav, DistinctErrorsForBadFiles) {
  auto kind_of = [](const std::vector<std::uint8_t>& bytes) {
    try {
      decode_wav(bytes);
    } catch (const WavError& e) {
      return e.kind();
    }
    return WavErrorKind::kIo;
  };
  std::vector<std::uint8_t> good = encode_wav(AudioBuffer::mono(48000, {0.1, 0.2, 0.3}), WavFormat::kPcm16);

  std::vector<std::uint8_t> not_riff = good;
  not_riff[0] = 'X';
  EXPECT_EQ(kind_of(not_riff), WavErrorKind::kMalformedHeader);

  std::vector<std::uint8_t> alaw = good;
  alaw[20] = 6;  // format tag
  EXPECT_EQ(kind_of(alaw), WavErrorKind::kUnsupportedCodec);

  std::vector<std::uint8_t> truncated(good.begin(), good.end() - 2);
  EXPECT_EQ(kind_of(truncated), WavErrorKind::kTruncatedData);
}

TEST(Dft, ConstantFrameIsDcOnly) {
  const Spectrum s = dft(std::vector<double>(8, 1.0));
  ASSERT_EQ(s.bins.size(), 5u);
  EXPECT_NEAR(s.bins[0].real(), 8.0, 1e-12);
  EXPECT_NEAR(s.bins[0].imag(), 0.0, 1e-12);
  for (std::size_t k = 1; k < s.bins.size(); ++k) EXPECT_LE(std::abs(s.bins[k]), 1e-12);
}

TEST(Dft, ImpulseIsFlat) {
  std::vector<double> x(16, 0.0);
  x[0] = 1.0;
  for (const auto& b : dft(x).bins) {
    EXPECT_NEAR(b.real(), 1.0, 1e-12);
    EXPECT_NEAR(b.imag(), 0.0, 1e-12);
  }
}

TEST(Dft, MatchesDirectSummation) {
  const auto x = oracle::white_noise(64, 5, 1.0);
  const Spectrum s = dft(x);
  const auto ref = oracle::direct_dft(x);
  for (std::size_t k = 0; k < s.bins.size(); ++k) {
    EXPECT_NEAR(s.bins[k].real(), ref[k][0], 1e-9);
    EXPECT_NEAR(s.bins[k].imag(), ref[k][1], 1e-9);
  }
}

TEST(Dft, Parseval) {
  const auto x = oracle::white_noise(1024, 9, 1.0);
  const Spectrum s = dft(x);
  // Half spectrum: interior bins stand for two full-spectrum bins.
  double spec = std::norm(s.bins.front()) + std::norm(s.bins.back());
  for (std::size_t k = 1; k + 1 < s.bins.size(); ++k) spec += 2.0 * std::norm(s.bins[k]);
  spec /= static_cast<double>(x.size());
  const double time = oracle::energy(x);
  EXPECT_NEAR(spec, time, 1e-9 * time);
}

TEST(Dft, RoundTripUpTo8192) {
  for (std::size_t n : {2u, 64u, 1024u, 8192u}) {
    const auto x = oracle::white_noise(n, n, 1.0);
    EXPECT_LT(max_abs_diff(idft(dft(x)), x), 1e-9) << n;
  }
}

TEST(Dft, RejectsEmptyAndNonPowerOfTwo) {
  EXPECT_THROW(dft(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(dft(std::vector<double>(12, 0.0)), std::invalid_argument);
  EXPECT_EQ(zero_pad_to_pow2(std::vector<double>(12, 1.0)).size(), 16u);
}

TEST(Convolve, UnitImpulseIsIdentity) {
  const auto x = oracle::white_noise(300, 1);
  EXPECT_EQ(convolve(x, std::vector<double>{1.0}), x);
}

TEST(Convolve, HandComputed) {
  const auto y = convolve(std::vector<double>{1, 0, 0}, std::vector<double>{0.5, 0.25});
  ASSERT_EQ(y.size(), 4u);
  EXPECT_EQ(y, (std::vector<double>{0.5, 0.25, 0, 0}));
}

TEST(Convolve, FftPathMatchesDirect) {
  const auto x = oracle::white_noise(4096, 21);
  const auto h = oracle::white_noise(512, 22);
  const auto y = convolve(x, h);
  const auto ref = oracle::direct_convolution(x, h);
  ASSERT_EQ(y.size(), ref.size());
  EXPECT_LE(max_abs_diff(y, ref) / max_abs(ref), 1e-9);
}

TEST(Convolve, PartitionedLongKernelMatchesDirect) {
  // Longer than one 8192-tap partition.
  const auto x = oracle::white_noise(3000, 31);
  const auto h = oracle::white_noise(20000, 32);
  const auto y = convolve(x, h);
  const auto ref = oracle::direct_convolution(x, h);
  ASSERT_EQ(y.size(), ref.size());
  EXPECT_LE(max_abs_diff(y, ref) / max_abs(ref), 1e-9);
}

TEST(Convolve, IsLinear) {
  const auto x = oracle::white_noise(2048, 41), z = oracle::white_noise(2048, 42);
  const auto h = oracle::white_noise(700, 43);
  const double a = 0.7, b = -1.3;
  std::vector<double> mix(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + b * z[i];
  const auto lhs = convolve(mix, h);
  const auto cx = convolve(x, h), cz = convolve(z, h);
  std::vector<double> rhs(lhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * cx[i] + b * cz[i];
  EXPECT_LE(max_abs_diff(lhs, rhs) / max_abs(rhs), 1e-9);
}

TEST(Convolve, BufferChannelRules) {
  const AudioBuffer mono = AudioBuffer::mono(48000, {1.0, 2.0});
  EXPECT_THROW(convolve(mono, ImpulseResponse(48000, std::vector<std::vector<double>>{{1.0, 0.0}, {0.0}})),
               std::invalid_argument);
  const AudioBuffer out = convolve(mono, ImpulseResponse(48000, std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}}));
  ASSERT_EQ(out.channel_count(), 2u);
  EXPECT_EQ(as_vector(out.channel(0)), (std::vector<double>{1, 2, 0}));
  EXPECT_EQ(as_vector(out.channel(1)), (std::vector<double>{0, 1, 2}));
  EXPECT_THROW(convolve(mono, ImpulseResponse(44100, std::vector<double>{1.0})), std::invalid_argument);
}

TEST(Resample, SameRateIsIdentity) {
  const AudioBuffer b = AudioBuffer::mono(48000, oracle::white_noise(999, 2));
  EXPECT_EQ(resample(b, 48000), b);
}

TEST(Resample, OneSecondTo48k) {
  const AudioBuffer b = AudioBuffer::mono(44100, oracle::sine(440, 0.5, 1.0, 44100));
  const AudioBuffer r = resample(b, 48000);
  EXPECT_EQ(r.sample_rate(), 48000);
  EXPECT_NEAR(static_cast<double>(r.frames()), 48000.0, 1.0);
}

TEST(Resample, DownsampledSineKeepsItsBin) {
  const AudioBuffer b = AudioBuffer::mono(48000, oracle::sine(440, 0.5, 0.5, 48000));
  const AudioBuffer r = resample(b, 24000);
  ASSERT_GE(r.frames(), 8192u);
  std::vector<double> frame(r.channel(0).begin() + 2000, r.channel(0).begin() + 2000 + 4096);
  const auto spec = oracle::direct_dft(frame);
  std::size_t best = 0;
  for (std::size_t k = 1; k < frame.size() / 2; ++k)
    if (std::hypot(spec[k][0], spec[k][1]) > std::hypot(spec[best][0], spec[best][1])) best = k;
  const double expected_bin = 440.0 * 4096.0 / 24000.0;
  EXPECT_LE(std::fabs(static_cast<double>(best) - expected_bin), 1.0);
}

TEST(Resample, OutputIsFinite) {
  const AudioBuffer b = AudioBuffer::mono(22050, oracle::white_noise(5000, 8, 1.0));
  EXPECT_TRUE(resample(b, 48000).all_finite());
  EXPECT_THROW(resample(b, 0), std::invalid_argument);
}

TEST(Buffer, RejectsRaggedChannels) {
  EXPECT_THROW(AudioBuffer(48000, {{1.0, 2.0}, {1.0}}), std::invalid_argument);
  EXPECT_THROW(AudioBuffer(0, 1, 10), std::invalid_argument);
}
