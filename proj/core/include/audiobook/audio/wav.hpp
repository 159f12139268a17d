#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "audiobook/audio/buffer.hpp"

namespace audiobook {

enum class WavFormat { kPcm16, kPcm24, kFloat32 };

enum class WavErrorKind {
  kIo,
  kMalformedHeader,
  kUnsupportedCodec,
  kTruncatedData,
  kSampleOutOfRange,
};

class WavError : public std::runtime_error {
 public:
  WavError(WavErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  WavErrorKind kind() const { return kind_; }

 private:
  WavErrorKind kind_;
};

// Accepts RIFF/WAVE with PCM 16/24-bit or IEEE float 32-bit samples
// (plain or WAVE_FORMAT_EXTENSIBLE), one or two channels. PCM is scaled
// by 1 / 2^(bits-1).
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);
AudioBuffer read_wav(const std::filesystem::path& path);

// PCM modes reject samples outside [-1, 1] instead of saturating.
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buf, WavFormat format);
void write_wav(const AudioBuffer& buf, const std::filesystem::path& path,
               WavFormat format = WavFormat::kFloat32);

}  // namespace audiobook
