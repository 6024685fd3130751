#pragma once

#include "phasehpss/signal.hpp"
#include "phasehpss/spectrogram.hpp"
#include "phasehpss/stft.hpp"

namespace phasehpss {

struct MedianConfig {
  int harm_kernel = 17;    // frames, median along time
  int perc_kernel = 17;    // bins, median along frequency
  double mask_power = 2.0; // Wiener mask exponent
};

void validate(const MedianConfig& mc);

// Medians over shrinking windows at the edges; even-sized edge windows use
// the mean of the two middle values.
RealGrid median_along_time(const RealGrid& m, int kernel);
RealGrid median_along_frequency(const RealGrid& m, int kernel);

struct MedianMasks {
  RealGrid harmonic_mag;
  RealGrid percussive_mag;
  RealGrid mask_h; // H^p / (H^p + P^p), 0/0 -> 0.5
};

MedianMasks median_filter_hpss(const Spectrogram& X, const MedianConfig& mc);

// mask (.) X
Spectrogram apply_mask(const Spectrogram& X, const RealGrid& mask);

// x_h = F^*(mask_h (.) F(x)), x_p = x - x_h.
SignalPair mf_separate(const Signal& x, const StftConfig& c,
                       const MedianConfig& mc);

// W = kappa / max(kappa, |pre_h| / max|pre_h|). All-zero input gives W == 1.
RealGrid compute_weight(const Spectrogram& pre_h, double kappa);

} // namespace phasehpss
