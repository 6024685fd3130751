#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasehpss/signal.hpp"

namespace phasehpss::synth {

// A mixture with its known stems.
struct Track {
  std::string name;
  Signal harmonic;
  Signal percussive;
  Signal mixture;
};

// Sinusoid on an exact bin of a win_len-point transform.
Signal on_bin_sinusoid(double bin, std::size_t win_len, std::size_t n,
                       int rate, double amplitude = 0.5, double phase = 0.0);

// Unit-height clicks every `period` samples starting at `offset`.
Signal impulse_train(std::size_t n, std::size_t period, std::size_t offset,
                     int rate, double height = 1.0);

// harmonic + percussive with the percussive stem scaled so both have equal
// energy (0 dB mixing ratio).
Track mix_equal_energy(std::string name, Signal harmonic, Signal percussive);

// Deterministic synthetic corpus of `count` tracks: sustained partials,
// vibrato and glides for the harmonic stems; impulse trains and decaying
// noise bursts for the percussive stems. Harmonic stems are scaled to the RMS
// of a sinusoid with amplitude 0.5 and percussive stems match their energy.
std::vector<Track> corpus(std::uint64_t seed, std::size_t count,
                          double seconds, int rate = 44100);

} // namespace phasehpss::synth
