#include "phasehpss/audio_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "phasehpss/error.hpp"

namespace phasehpss {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}

void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct Format {
  std::uint16_t code = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const unsigned char* p, const Format& f) {
  if (f.code == kFormatFloat) {
    if (f.bits == 32) return std::bit_cast<float>(le32(p));
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  switch (f.bits) {
  case 16:
    return static_cast<std::int16_t>(le16(p)) / 32768.0;
  case 24: {
    std::int32_t v = std::int32_t(p[0]) | std::int32_t(p[1]) << 8 | std::int32_t(p[2]) << 16;
    if (v & 0x800000) v -= 0x1000000;
    return v / 8388608.0;
  }
  case 32:
    return static_cast<std::int32_t>(le32(p)) / 2147483648.0;
  default:
    throw FormatError("unsupported PCM bit depth " + std::to_string(f.bits));
  }
}

} // namespace

Signal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(path.string() + " is not a RIFF/WAVE file");
  }

  Format fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw FormatError("truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      fmt.code = le16(f);
      fmt.channels = le16(f + 2);
      fmt.rate = le32(f + 4);
      fmt.bits = le16(f + 14);
      if (fmt.code == kFormatExtensible) {
        if (avail < 26) throw FormatError("truncated extensible fmt chunk");
        fmt.code = le16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }

  if (!have_fmt) throw FormatError("missing fmt chunk");
  if (!data) throw FormatError("missing data chunk");
  const bool pcm_ok = fmt.code == kFormatPcm &&
                      (fmt.bits == 16 || fmt.bits == 24 || fmt.bits == 32);
  const bool float_ok = fmt.code == kFormatFloat && (fmt.bits == 32 || fmt.bits == 64);
  if (!pcm_ok && !float_ok) {
    throw FormatError("unsupported codec (format " + std::to_string(fmt.code) + ", " +
                      std::to_string(fmt.bits) + " bits)");
  }
  if (fmt.channels == 0 || fmt.rate == 0) throw FormatError("invalid fmt chunk");

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t n = data_size / frame_bytes;
  if (n == 0) throw FormatError(path.string() + " contains no audio");

  Signal s;
  s.sample_rate = static_cast<int>(fmt.rate);
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t ch = 0; ch < fmt.channels; ++ch) {
      acc += decode_sample(data + i * frame_bytes + ch * bytes_per_sample, fmt);
    }
    s.samples[i] = acc / fmt.channels;
  }
  return s;
}

WriteReport write_wav(const std::filesystem::path& path, const Signal& s,
                      BitDepth depth) {
  validate(s);
  WriteReport report;

  const std::uint16_t bits = depth == BitDepth::Pcm16 ? 16 : depth == BitDepth::Pcm24 ? 24 : 32;
  const std::uint16_t code = depth == BitDepth::Float32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t block = bits / 8;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(s.size() * block);

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes + 1);
  put_tag(out, "RIFF");
  put32(out, 36 + data_bytes + (data_bytes & 1));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, code);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(s.sample_rate));
  put32(out, static_cast<std::uint32_t>(s.sample_rate) * block);
  put16(out, static_cast<std::uint16_t>(block));
  put16(out, bits);
  put_tag(out, "data");
  put32(out, data_bytes);

  for (double v : s.samples) {
    if (v > 1.0 || v < -1.0) {
      ++report.clipped;
      v = std::clamp(v, -1.0, 1.0);
    }
    switch (depth) {
    case BitDepth::Float32:
      put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      break;
    case BitDepth::Pcm16: {
      const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
      put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      break;
    }
    case BitDepth::Pcm24: {
      const long q = std::clamp(std::lround(v * 8388608.0), -8388608L, 8388607L);
      const auto u = static_cast<std::uint32_t>(static_cast<std::int32_t>(q));
      out.push_back(u & 0xFF);
      out.push_back((u >> 8) & 0xFF);
      out.push_back((u >> 16) & 0xFF);
      break;
    }
    }
  }
  if (data_bytes & 1) out.push_back(0);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());

  if (report.clipped > 0) {
    std::cerr << "warning: " << report.clipped << " sample(s) clipped to [-1, 1] in "
              << path.string() << '\n';
  }
  return report;
}

} // namespace phasehpss
