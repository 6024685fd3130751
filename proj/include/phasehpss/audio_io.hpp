#pragma once

#include <cstddef>
#include <filesystem>

#include "phasehpss/signal.hpp"

namespace phasehpss {

enum class BitDepth { Pcm16, Pcm24, Float32 };

// Reads a RIFF/WAVE file holding 16/24/32-bit PCM or 32-bit IEEE float.
// Integer samples are divided by the format's full-scale magnitude (2^15,
// 2^23, 2^31) and channels are averaged into a single mono channel.
Signal read_wav(const std::filesystem::path& path);

struct WriteReport {
  std::size_t clipped = 0; // samples hard-limited to [-1, 1]
};

// Writes a mono WAV. Samples outside [-1, 1] are clipped and a warning is
// printed to stderr; the count is returned.
WriteReport write_wav(const std::filesystem::path& path, const Signal& s,
                      BitDepth depth = BitDepth::Float32);

} // namespace phasehpss
