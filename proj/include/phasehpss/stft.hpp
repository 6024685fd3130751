#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "phasehpss/signal.hpp"
#include "phasehpss/spectrogram.hpp"

namespace phasehpss {

// Periodic Hann window g_l = 0.5 - 0.5 cos(2 pi l / L).
std::vector<double> make_hann(std::size_t len);

// Analytic time derivative of the periodic Hann window, per sample:
// dg/dl = (pi / L) sin(2 pi l / L).
std::vector<double> make_hann_derivative(std::size_t len);

// Canonical tight window: g_l / sqrt(sum_k g_{l + k a}^2). Throws when some
// residue class mod `hop` has zero energy.
std::vector<double> make_tight(std::span<const double> window, std::size_t hop);

// Frame geometry plus the analysis window and its derivative. Build it with
// `hann` unless a custom window is needed.
struct StftConfig {
  std::size_t win_len = 4096;
  std::size_t hop = 1024;
  std::vector<double> window;       // tight analysis window
  std::vector<double> deriv_window; // derivative window, same normalizer

  std::size_t n_bins() const noexcept { return win_len / 2 + 1; }

  // Frame t covers samples [t*hop - pad(), t*hop - pad() + win_len). The
  // first frame starts early enough, and the last late enough, that every
  // sample of the signal sees the full set of win_len/hop overlapping frames.
  // When 2*hop divides win_len, frame centres fall on multiples of hop.
  std::ptrdiff_t pad() const noexcept {
    return static_cast<std::ptrdiff_t>(win_len - hop);
  }
  std::size_t n_frames(std::size_t signal_len) const noexcept {
    return (signal_len == 0 ? 0 : (signal_len - 1) / hop) + win_len / hop;
  }
  // Sample index on which frame t is centred (may be negative).
  std::ptrdiff_t frame_center(std::size_t t) const noexcept {
    return static_cast<std::ptrdiff_t>(t * hop) - pad() +
           static_cast<std::ptrdiff_t>(win_len / 2);
  }

  // Tight Hann configuration with the analytic derivative window.
  static StftConfig hann(std::size_t win_len, std::size_t hop);
};

// Throws InvalidArgument when the geometry or windows are inconsistent.
void validate(const StftConfig& c);

// X(w, t) = L^{-1/2} sum_l x[l + a t - pad] g_l exp(-2 pi j w l / L),
// w = 0..L/2, with zeros outside the signal. The L^{-1/2} factor makes the
// frame Parseval under the weighted inner product of `inner`.
Spectrogram forward(std::span<const double> x, const StftConfig& c);
Spectrogram forward(const Signal& x, const StftConfig& c);

// Same transform with an arbitrary window of length win_len.
Spectrogram forward_with_window(std::span<const double> x, const StftConfig& c,
                                std::span<const double> window);

// Exact adjoint of `forward`. With a tight window adjoint(forward(x)) == x.
std::vector<double> adjoint(const Spectrogram& X, const StftConfig& c);

// Binary dump: 8-byte magic, then little-endian uint64 K, T, L, a, then the
// K x T payload row-major (bin-major) as float64. Complex payloads are
// interleaved re/im. Real grids use a distinct magic.
inline constexpr char kSpectrogramMagic[8] = {'P', 'H', 'S', 'P', 'E', 'C', '0', '1'};
inline constexpr char kRealGridMagic[8] = {'P', 'H', 'S', 'R', 'E', 'A', 'L', '1'};

void dump_spectrogram(const std::filesystem::path& path, const Spectrogram& X,
                      const StftConfig& c);
void dump_real_grid(const std::filesystem::path& path, const RealGrid& g,
                    const StftConfig& c);

struct SpectrogramDump {
  std::size_t win_len = 0;
  std::size_t hop = 0;
  bool complex_payload = true;
  Spectrogram spec; // real dumps land in the real parts
};

SpectrogramDump load_dump(const std::filesystem::path& path);

} // namespace phasehpss
