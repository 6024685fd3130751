#include "phasehpss/stft.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "phasehpss/error.hpp"

namespace phasehpss {

std::vector<double> make_hann(std::size_t len) {
  if (len < 2) throw InvalidArgument("Hann window needs at least 2 samples");
  std::vector<double> g(len);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(len);
  for (std::size_t l = 0; l < len; ++l) g[l] = 0.5 - 0.5 * std::cos(step * l);
  return g;
}

std::vector<double> make_hann_derivative(std::size_t len) {
  if (len < 2) throw InvalidArgument("Hann window needs at least 2 samples");
  std::vector<double> d(len);
  const double L = static_cast<double>(len);
  const double step = 2.0 * std::numbers::pi / L;
  for (std::size_t l = 0; l < len; ++l) d[l] = std::numbers::pi / L * std::sin(step * l);
  return d;
}

namespace {

// sqrt(sum_k g_{l + k a}^2) for every l.
std::vector<double> tight_normalizer(std::span<const double> g, std::size_t hop) {
  if (hop == 0 || g.size() % hop != 0) {
    throw InvalidArgument("hop must divide the window length");
  }
  std::vector<double> residue(hop, 0.0);
  for (std::size_t l = 0; l < g.size(); ++l) residue[l % hop] += g[l] * g[l];
  std::vector<double> out(g.size());
  for (std::size_t l = 0; l < g.size(); ++l) {
    if (!(residue[l % hop] > 0.0)) {
      throw InvalidArgument("window/hop combination leaves samples uncovered");
    }
    out[l] = std::sqrt(residue[l % hop]);
  }
  return out;
}

} // namespace

std::vector<double> make_tight(std::span<const double> window, std::size_t hop) {
  const auto denom = tight_normalizer(window, hop);
  std::vector<double> w(window.size());
  for (std::size_t l = 0; l < w.size(); ++l) w[l] = window[l] / denom[l];
  return w;
}

StftConfig StftConfig::hann(std::size_t win_len, std::size_t hop) {
  StftConfig c;
  c.win_len = win_len;
  c.hop = hop;
  if (win_len < 2 || win_len % 2 != 0) {
    throw InvalidArgument("window length must be even and >= 2");
  }
  if (hop == 0 || hop > win_len || win_len % hop != 0) {
    throw InvalidArgument("hop must be positive and divide the window length");
  }
  const auto g = make_hann(win_len);
  const auto dg = make_hann_derivative(win_len);
  const auto denom = tight_normalizer(g, hop);
  c.window.resize(win_len);
  c.deriv_window.resize(win_len);
  for (std::size_t l = 0; l < win_len; ++l) {
    c.window[l] = g[l] / denom[l];
    c.deriv_window[l] = dg[l] / denom[l];
  }
  return c;
}

void validate(const StftConfig& c) {
  if (c.win_len < 2 || c.win_len % 2 != 0) {
    throw InvalidArgument("window length must be even and >= 2");
  }
  if (c.hop == 0 || c.hop > c.win_len || c.win_len % c.hop != 0) {
    throw InvalidArgument("hop must be positive and divide the window length");
  }
  if (c.window.size() != c.win_len) throw InvalidArgument("window length mismatch");
  if (!c.deriv_window.empty() && c.deriv_window.size() != c.win_len) {
    throw InvalidArgument("derivative window length mismatch");
  }
}

Spectrogram forward_with_window(std::span<const double> x, const StftConfig& c,
                                std::span<const double> window) {
  validate(c);
  if (x.empty()) throw InvalidArgument("cannot transform an empty signal");
  if (window.size() != c.win_len) throw ShapeError("window length mismatch");
  const std::size_t L = c.win_len;
  const std::size_t K = c.n_bins();
  const std::size_t T = c.n_frames(x.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));

  detail::RealFft fft(L);
  auto buf = fft.real();
  auto spec = fft.spectrum();
  Spectrogram X(K, T, x.size());
  for (std::size_t t = 0; t < T; ++t) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t * c.hop) - c.pad();
    for (std::size_t l = 0; l < L; ++l) {
      const std::ptrdiff_t i = start + static_cast<std::ptrdiff_t>(l);
      buf[l] = (i >= 0 && i < n) ? x[static_cast<std::size_t>(i)] * window[l] : 0.0;
    }
    fft.forward();
    auto frame = X.frame(t);
    for (std::size_t k = 0; k < K; ++k) frame[k] = spec[k] * scale;
  }
  return X;
}

Spectrogram forward(std::span<const double> x, const StftConfig& c) {
  return forward_with_window(x, c, c.window);
}

Spectrogram forward(const Signal& x, const StftConfig& c) { return forward(x.view(), c); }

std::vector<double> adjoint(const Spectrogram& X, const StftConfig& c) {
  validate(c);
  const std::size_t L = c.win_len;
  const std::size_t K = c.n_bins();
  const std::size_t n = X.signal_length;
  if (X.bins() != K || X.frames() != c.n_frames(n)) {
    throw ShapeError("spectrogram shape does not match the STFT configuration");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));

  detail::RealFft fft(L);
  auto buf = fft.real();
  auto spec = fft.spectrum();
  std::vector<double> out(n, 0.0);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::size_t t = 0; t < X.frames(); ++t) {
    auto frame = X.frame(t);
    std::copy(frame.begin(), frame.end(), spec.begin());
    // Only the real parts of DC and Nyquist reach the forward image.
    spec.front().imag(0.0);
    spec.back().imag(0.0);
    fft.inverse();
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t * c.hop) - c.pad();
    for (std::size_t l = 0; l < L; ++l) {
      const std::ptrdiff_t i = start + static_cast<std::ptrdiff_t>(l);
      if (i >= 0 && i < sn) out[static_cast<std::size_t>(i)] += scale * c.window[l] * buf[l];
    }
  }
  return out;
}

namespace {

void write_u64(std::ofstream& f, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xFF;
  f.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ofstream& f, double v) { write_u64(f, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t read_u64(std::ifstream& f) {
  unsigned char b[8];
  if (!f.read(reinterpret_cast<char*>(b), 8)) throw FormatError("truncated dump");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

template <typename Payload>
void write_dump(const std::filesystem::path& path, const char (&magic)[8], std::size_t K,
                std::size_t T, const StftConfig& c, Payload&& payload) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(magic, 8);
  write_u64(f, K);
  write_u64(f, T);
  write_u64(f, c.win_len);
  write_u64(f, c.hop);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t t = 0; t < T; ++t) payload(f, k, t);
  }
  if (!f) throw IoError("write failed for " + path.string());
}

} // namespace

void dump_spectrogram(const std::filesystem::path& path, const Spectrogram& X,
                      const StftConfig& c) {
  write_dump(path, kSpectrogramMagic, X.bins(), X.frames(), c,
             [&](std::ofstream& f, std::size_t k, std::size_t t) {
               write_f64(f, X(k, t).real());
               write_f64(f, X(k, t).imag());
             });
}

void dump_real_grid(const std::filesystem::path& path, const RealGrid& g,
                    const StftConfig& c) {
  write_dump(path, kRealGridMagic, g.bins(), g.frames(), c,
             [&](std::ofstream& f, std::size_t k, std::size_t t) { write_f64(f, g(k, t)); });
}

SpectrogramDump load_dump(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  char magic[8];
  if (!f.read(magic, 8)) throw FormatError("truncated dump");
  SpectrogramDump d;
  if (std::memcmp(magic, kSpectrogramMagic, 8) == 0) {
    d.complex_payload = true;
  } else if (std::memcmp(magic, kRealGridMagic, 8) == 0) {
    d.complex_payload = false;
  } else {
    throw FormatError(path.string() + " is not a spectrogram dump");
  }
  const auto K = read_u64(f);
  const auto T = read_u64(f);
  d.win_len = read_u64(f);
  d.hop = read_u64(f);
  d.spec = Spectrogram(K, T);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t t = 0; t < T; ++t) {
      const double re = std::bit_cast<double>(read_u64(f));
      const double im = d.complex_payload ? std::bit_cast<double>(read_u64(f)) : 0.0;
      d.spec(k, t) = {re, im};
    }
  }
  return d;
}

} // namespace phasehpss
