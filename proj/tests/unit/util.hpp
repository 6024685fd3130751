#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "phasehpss/spectrogram.hpp"

namespace testutil {

using Rng = std::mt19937_64;

inline std::vector<double> random_signal(Rng& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

inline phasehpss::Spectrogram random_spec(Rng& rng, std::size_t bins, std::size_t frames,
                                          std::size_t signal_len = 0) {
  std::normal_distribution<double> g;
  phasehpss::Spectrogram X(bins, frames, signal_len);
  for (auto& v : X.values()) v = {g(rng), g(rng)};
  return X;
}

inline double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

inline double rel_diff(const phasehpss::Spectrogram& a, const phasehpss::Spectrogram& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    num += std::norm(a.values()[i] - b.values()[i]);
    den += std::norm(b.values()[i]);
  }
  return std::sqrt(num / den);
}

} // namespace testutil
