#include "phasehpss/signal.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "phasehpss/error.hpp"

namespace phasehpss {

void validate(const Signal& s) {
  if (s.samples.empty()) throw InvalidArgument("signal is empty");
  if (s.sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (!std::isfinite(s.samples[i])) {
      throw InvalidArgument("non-finite sample at index " + std::to_string(i));
    }
  }
}

void validate(const SignalPair& pair) {
  validate(pair.harmonic);
  validate(pair.percussive);
  if (pair.harmonic.size() != pair.percussive.size()) {
    throw ShapeError("harmonic and percussive lengths differ");
  }
  if (pair.harmonic.sample_rate != pair.percussive.sample_rate) {
    throw ShapeError("harmonic and percussive sample rates differ");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

} // namespace phasehpss
