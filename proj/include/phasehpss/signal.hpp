#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace phasehpss {

// A mono waveform. Samples are nominally in [-1, 1].
struct Signal {
  std::vector<double> samples;
  int sample_rate = 44100;

  std::size_t size() const noexcept { return samples.size(); }
  std::span<const double> view() const noexcept { return samples; }
};

// Throws InvalidArgument unless the signal is non-empty, finite and has a
// positive rate.
void validate(const Signal& s);

// Harmonic / percussive estimate pair. Both members share length and rate.
struct SignalPair {
  Signal harmonic;
  Signal percussive;
};

void validate(const SignalPair& pair);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double max_abs(std::span<const double> a);

} // namespace phasehpss
