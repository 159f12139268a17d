#include "audiobook/audio/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

namespace audiobook {
namespace {

constexpr std::uint16_t kTagPcm = 1;
constexpr std::uint16_t kTagFloat = 3;
constexpr std::uint16_t kTagExtensible = 0xFFFE;

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk parse_fmt(std::span<const std::uint8_t> b, std::size_t at, std::uint32_t size) {
  if (size < 16) throw WavError(WavErrorKind::kMalformedHeader, "fmt chunk shorter than 16 bytes");
  FormatChunk f;
  f.tag = get_u16(b, at);
  f.channels = get_u16(b, at + 2);
  f.rate = get_u32(b, at + 4);
  f.block_align = get_u16(b, at + 12);
  f.bits = get_u16(b, at + 14);
  if (f.tag == kTagExtensible) {
    if (size < 40) throw WavError(WavErrorKind::kMalformedHeader, "extensible fmt chunk too short");
    // The GUID sub-format starts with the plain format tag.
    f.tag = get_u16(b, at + 24);
  }
  if (f.rate == 0) throw WavError(WavErrorKind::kMalformedHeader, "sample rate is zero");
  if (f.channels < 1 || f.channels > 2) {
    throw WavError(WavErrorKind::kUnsupportedCodec,
                   "unsupported channel count " + std::to_string(f.channels));
  }
  const bool ok = (f.tag == kTagPcm && (f.bits == 16 || f.bits == 24)) ||
                  (f.tag == kTagFloat && f.bits == 32);
  if (!ok) {
    throw WavError(WavErrorKind::kUnsupportedCodec,
                   "unsupported codec tag " + std::to_string(f.tag) + " with " +
                       std::to_string(f.bits) + " bits");
  }
  if (f.block_align != f.channels * (f.bits / 8)) {
    throw WavError(WavErrorKind::kMalformedHeader, "block alignment disagrees with format");
  }
  return f;
}

double decode_sample(std::span<const std::uint8_t> b, std::size_t at, const FormatChunk& f) {
  if (f.tag == kTagFloat) {
    return static_cast<double>(std::bit_cast<float>(get_u32(b, at)));
  }
  if (f.bits == 16) {
    return static_cast<double>(static_cast<std::int16_t>(get_u16(b, at))) / 32768.0;
  }
  std::int32_t v = static_cast<std::int32_t>(b[at] | (b[at + 1] << 8) | (b[at + 2] << 16));
  if (v & 0x800000) v -= 0x1000000;
  return static_cast<double>(v) / 8388608.0;
}

}  // namespace

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw WavError(WavErrorKind::kMalformedHeader, "not a RIFF/WAVE file");
  }
  std::optional<FormatChunk> fmt;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = get_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (body + size > bytes.size()) {
        throw WavError(WavErrorKind::kMalformedHeader, "fmt chunk runs past end of file");
      }
      fmt = parse_fmt(bytes, body, size);
    } else if (tag_is(bytes, pos, "data")) {
      if (!fmt) throw WavError(WavErrorKind::kMalformedHeader, "data chunk before fmt chunk");
      if (body + size > bytes.size()) {
        throw WavError(WavErrorKind::kTruncatedData,
                       "data chunk declares " + std::to_string(size) + " bytes, file holds " +
                           std::to_string(bytes.size() - body));
      }
      if (size % fmt->block_align != 0) {
        throw WavError(WavErrorKind::kTruncatedData, "data chunk ends mid-frame");
      }
      const std::size_t frames = size / fmt->block_align;
      const std::size_t width = fmt->bits / 8;
      AudioBuffer out(static_cast<int>(fmt->rate), fmt->channels, frames);
      for (std::size_t i = 0; i < frames; ++i) {
        for (std::size_t c = 0; c < fmt->channels; ++c) {
          const double s = decode_sample(bytes, body + i * fmt->block_align + c * width, *fmt);
          if (!std::isfinite(s)) {
            throw WavError(WavErrorKind::kSampleOutOfRange, "non-finite float sample");
          }
          out.channel(c)[i] = s;
        }
      }
      return out;
    }
    pos = body + size + (size & 1u);
  }
  if (!fmt) throw WavError(WavErrorKind::kMalformedHeader, "missing fmt chunk");
  throw WavError(WavErrorKind::kTruncatedData, "missing data chunk");
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError(WavErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw WavError(WavErrorKind::kIo, "read failed for " + path.string());
  return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buf, WavFormat format) {
  const std::size_t cc = buf.channel_count();
  if (cc < 1 || cc > 2) {
    throw WavError(WavErrorKind::kUnsupportedCodec, "only mono and stereo can be written");
  }
  const bool is_float = format == WavFormat::kFloat32;
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : format == WavFormat::kPcm24 ? 24 : 32;
  const std::uint16_t width = bits / 8;
  const auto block = static_cast<std::uint16_t>(cc * width);
  const std::size_t frames = buf.frames();
  const std::uint64_t data_size = static_cast<std::uint64_t>(frames) * block;
  if (data_size > 0xFFFFFF00ull) throw WavError(WavErrorKind::kIo, "audio too long for RIFF");

  std::vector<std::uint8_t> out;
  const std::uint32_t fmt_size = is_float ? 18 : 16;
  const std::uint32_t fact_total = is_float ? 12 : 0;
  const std::uint32_t padded = static_cast<std::uint32_t>(data_size + (data_size & 1u));
  out.reserve(44 + fact_total + padded + 2);
  put_tag(out, "RIFF");
  put_u32(out, 4 + (8 + fmt_size) + fact_total + 8 + padded);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, fmt_size);
  put_u16(out, is_float ? kTagFloat : kTagPcm);
  put_u16(out, static_cast<std::uint16_t>(cc));
  put_u32(out, static_cast<std::uint32_t>(buf.sample_rate()));
  put_u32(out, static_cast<std::uint32_t>(buf.sample_rate()) * block);
  put_u16(out, block);
  put_u16(out, bits);
  if (is_float) {
    put_u16(out, 0);
    put_tag(out, "fact");
    put_u32(out, 4);
    put_u32(out, static_cast<std::uint32_t>(frames));
  }
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_size));

  const double full = is_float ? 1.0 : std::ldexp(1.0, bits - 1);
  const auto top = static_cast<long long>(full) - 1;
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < cc; ++c) {
      const double s = buf.channel(c)[i];
      if (!std::isfinite(s)) throw WavError(WavErrorKind::kSampleOutOfRange, "non-finite sample");
      if (is_float) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
        continue;
      }
      if (s < -1.0 || s > 1.0) {
        throw WavError(WavErrorKind::kSampleOutOfRange,
                       "sample " + std::to_string(s) + " at frame " + std::to_string(i) +
                           " exceeds full scale; limit before writing PCM");
      }
      const long long q = std::min(std::llround(s * full), top);
      const auto u = static_cast<std::uint32_t>(q);
      out.push_back(static_cast<std::uint8_t>(u & 0xFF));
      out.push_back(static_cast<std::uint8_t>((u >> 8) & 0xFF));
      if (bits == 24) out.push_back(static_cast<std::uint8_t>((u >> 16) & 0xFF));
    }
  }
  if (data_size & 1u) out.push_back(0);
  return out;
}

void write_wav(const AudioBuffer& buf, const std::filesystem::path& path, WavFormat format) {
  const auto bytes = encode_wav(buf, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WavError(WavErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw WavError(WavErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace audiobook
