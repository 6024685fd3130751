#include "phasehpss/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "phasehpss/error.hpp"

namespace phasehpss::synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// RMS of a sinusoid with amplitude 0.5. Percussive stems are matched in
// energy, so sparse ones peak well above full scale.
const double kHarmonicRms = 0.5 / std::numbers::sqrt2;

double energy(const std::vector<double>& v) {
  double e = 0.0;
  for (double a : v) e += a * a;
  return e;
}

// Raised-cosine fade of `len` samples at both ends of a note.
double fade(std::size_t i, std::size_t n, std::size_t len) {
  if (len == 0) return 1.0;
  const std::size_t d = std::min(i, n - 1 - i);
  if (d >= len) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(d) / len);
}

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Sequence of harmonic notes with 1/h partial amplitudes.
std::vector<double> note_sequence(Rng& rng, std::size_t n, int rate) {
  std::vector<double> out(n, 0.0);
  const std::size_t note_len = static_cast<std::size_t>(uniform(rng, 0.6, 1.2) * rate);
  const int partials = static_cast<int>(uniform(rng, 4, 8.99));
  for (std::size_t start = 0; start < n; start += note_len) {
    const std::size_t len = std::min(note_len, n - start);
    const double f0 = 110.0 * std::pow(2.0, uniform(rng, 0.0, 2.0));
    for (int h = 1; h <= partials; ++h) {
      const double f = f0 * h;
      if (f >= 0.45 * rate) break;
      const double phase = uniform(rng, 0.0, kTwoPi);
      for (std::size_t i = 0; i < len; ++i) {
        out[start + i] += fade(i, len, rate / 50) / h *
                          std::sin(kTwoPi * f * static_cast<double>(i) / rate + phase);
      }
    }
  }
  return out;
}

std::vector<double> vibrato_tone(Rng& rng, std::size_t n, int rate) {
  std::vector<double> out(n, 0.0);
  const double f0 = 110.0 * std::pow(2.0, uniform(rng, 0.5, 2.0));
  const double depth = uniform(rng, 0.002, 0.006);
  const double vib = uniform(rng, 4.0, 6.0);
  for (int h = 1; h <= 5; ++h) {
    double phase = uniform(rng, 0.0, kTwoPi);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate;
      const double f = h * f0 * (1.0 + depth * std::sin(kTwoPi * vib * t));
      phase += kTwoPi * f / rate;
      out[i] += std::sin(phase) / h;
    }
  }
  return out;
}

std::vector<double> glide(Rng& rng, std::size_t n, int rate) {
  std::vector<double> out(n, 0.0);
  const double f_start = uniform(rng, 200.0, 600.0);
  const double f_end = f_start * std::pow(2.0, uniform(rng, -0.5, 0.5));
  for (int h = 1; h <= 3; ++h) {
    double phase = uniform(rng, 0.0, kTwoPi);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(n);
      const double f = h * f_start * std::pow(f_end / f_start, u);
      phase += kTwoPi * f / rate;
      out[i] += fade(i, n, rate / 50) * std::sin(phase) / h;
    }
  }
  return out;
}

std::vector<double> clicks(Rng& rng, std::size_t n, int rate) {
  std::vector<double> out(n, 0.0);
  const auto period = static_cast<std::size_t>(uniform(rng, 0.2, 0.45) * rate);
  const auto offset = static_cast<std::size_t>(uniform(rng, 0.02, 0.15) * rate);
  for (std::size_t i = offset; i < n; i += period) out[i] = uniform(rng, 0.6, 1.0);
  return out;
}

std::vector<double> noise_bursts(Rng& rng, std::size_t n, int rate) {
  std::vector<double> out(n, 0.0);
  std::normal_distribution<double> gauss;
  const auto period = static_cast<std::size_t>(uniform(rng, 0.25, 0.5) * rate);
  const double decay = uniform(rng, 0.01, 0.03) * rate;
  for (std::size_t start = static_cast<std::size_t>(0.05 * rate); start < n; start += period) {
    for (std::size_t i = 0; start + i < n && i < static_cast<std::size_t>(6 * decay); ++i) {
      out[start + i] += std::exp(-static_cast<double>(i) / decay) * gauss(rng);
    }
  }
  return out;
}

// Scales all three signals so the harmonic stem has the given RMS.
void normalize_harmonic_rms(Track& t, double rms) {
  const double e = energy(t.harmonic.samples);
  if (e == 0.0) return;
  const double g = rms / std::sqrt(e / static_cast<double>(t.harmonic.size()));
  for (auto* s : {&t.harmonic, &t.percussive, &t.mixture}) {
    for (auto& v : s->samples) v *= g;
  }
}

} // namespace

Signal on_bin_sinusoid(double bin, std::size_t win_len, std::size_t n, int rate,
                       double amplitude, double phase) {
  Signal s{std::vector<double>(n), rate};
  const double w = kTwoPi * bin / static_cast<double>(win_len);
  for (std::size_t i = 0; i < n; ++i) s.samples[i] = amplitude * std::cos(w * i + phase);
  return s;
}

Signal impulse_train(std::size_t n, std::size_t period, std::size_t offset, int rate,
                     double height) {
  if (period == 0) throw InvalidArgument("impulse period must be positive");
  Signal s{std::vector<double>(n, 0.0), rate};
  for (std::size_t i = offset; i < n; i += period) s.samples[i] = height;
  return s;
}

Track mix_equal_energy(std::string name, Signal harmonic, Signal percussive) {
  if (harmonic.size() != percussive.size()) throw ShapeError("stem lengths differ");
  const double eh = energy(harmonic.samples);
  const double ep = energy(percussive.samples);
  if (eh > 0.0 && ep > 0.0) {
    const double g = std::sqrt(eh / ep);
    for (auto& v : percussive.samples) v *= g;
  }
  Track t;
  t.name = std::move(name);
  t.mixture = Signal{std::vector<double>(harmonic.size()), harmonic.sample_rate};
  for (std::size_t i = 0; i < harmonic.size(); ++i) {
    t.mixture.samples[i] = harmonic.samples[i] + percussive.samples[i];
  }
  t.harmonic = std::move(harmonic);
  t.percussive = std::move(percussive);
  return t;
}

std::vector<Track> corpus(std::uint64_t seed, std::size_t count, double seconds, int rate) {
  if (!(seconds > 0.0) || rate <= 0) throw InvalidArgument("invalid corpus geometry");
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(seconds * rate);
  static const char* kHarm[] = {"notes", "vibrato", "glide"};
  static const char* kPerc[] = {"clicks", "bursts"};

  std::vector<Track> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t hk = i % 3;
    const std::size_t pk = i % 2;
    std::vector<double> h = hk == 0 ? note_sequence(rng, n, rate)
                            : hk == 1 ? vibrato_tone(rng, n, rate)
                                      : glide(rng, n, rate);
    std::vector<double> p = pk == 0 ? clicks(rng, n, rate) : noise_bursts(rng, n, rate);
    std::string name = "synth" + std::to_string(i) + "-" + kHarm[hk] + "-" + kPerc[pk];
    Track t = mix_equal_energy(std::move(name), Signal{std::move(h), rate},
                               Signal{std::move(p), rate});
    normalize_harmonic_rms(t, kHarmonicRms);
    out.push_back(std::move(t));
  }
  return out;
}

} // namespace phasehpss::synth
