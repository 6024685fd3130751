#include "phasehpss/spectrogram.hpp"

#include <cmath>

#include "phasehpss/error.hpp"

namespace phasehpss {

double inner(const Spectrogram& x, const Spectrogram& y) {
  if (!x.same_shape(y)) throw ShapeError("inner: spectrogram shapes differ");
  const std::size_t K = x.bins();
  double acc = 0.0;
  for (std::size_t t = 0; t < x.frames(); ++t) {
    auto xf = x.frame(t);
    auto yf = y.frame(t);
    for (std::size_t k = 0; k < K; ++k) {
      acc += bin_weight(k, K) *
             (xf[k].real() * yf[k].real() + xf[k].imag() * yf[k].imag());
    }
  }
  return acc;
}

double norm_sq(const Spectrogram& x) { return inner(x, x); }

double frame_norm(const Spectrogram& x, std::size_t t) {
  const std::size_t K = x.bins();
  auto f = x.frame(t);
  double acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) acc += bin_weight(k, K) * std::norm(f[k]);
  return std::sqrt(acc);
}

void scale(Spectrogram& x, double factor) {
  for (auto& v : x.values()) v *= factor;
}

void axpy(double a, const Spectrogram& x, Spectrogram& y) {
  if (!x.same_shape(y)) throw ShapeError("axpy: spectrogram shapes differ");
  auto xs = x.values();
  auto ys = y.values();
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += a * xs[i];
}

RealGrid magnitude(const Spectrogram& x) {
  RealGrid m(x.bins(), x.frames());
  auto xs = x.values();
  auto ms = m.values();
  for (std::size_t i = 0; i < xs.size(); ++i) ms[i] = std::abs(xs[i]);
  return m;
}

} // namespace phasehpss
