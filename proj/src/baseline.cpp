#include "phasehpss/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "phasehpss/error.hpp"

namespace phasehpss {

void validate(const MedianConfig& mc) {
  if (mc.harm_kernel < 3 || mc.harm_kernel % 2 == 0) {
    throw InvalidArgument("harmonic kernel must be odd and >= 3");
  }
  if (mc.perc_kernel < 3 || mc.perc_kernel % 2 == 0) {
    throw InvalidArgument("percussive kernel must be odd and >= 3");
  }
  if (!(mc.mask_power >= 1.0)) throw InvalidArgument("mask power must be >= 1");
}

namespace {

double median_of(std::vector<double>& buf) {
  const std::size_t n = buf.size();
  const std::size_t mid = n / 2;
  std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
  const double upper = buf[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(buf.begin(), buf.begin() + mid);
  return 0.5 * (lower + upper);
}

// Sliding median over a strided line of `count` values.
template <typename Get, typename Set>
void median_line(std::size_t count, int kernel, Get get, Set set, std::vector<double>& buf) {
  if (kernel < 1 || kernel % 2 == 0) throw InvalidArgument("median kernel must be odd and positive");
  const auto half = static_cast<std::ptrdiff_t>(kernel / 2);
  const auto n = static_cast<std::ptrdiff_t>(count);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    buf.clear();
    for (std::ptrdiff_t j = lo; j <= hi; ++j) buf.push_back(get(static_cast<std::size_t>(j)));
    set(static_cast<std::size_t>(i), median_of(buf));
  }
}

} // namespace

RealGrid median_along_time(const RealGrid& m, int kernel) {
  RealGrid out(m.bins(), m.frames());
  std::vector<double> buf;
  for (std::size_t k = 0; k < m.bins(); ++k) {
    median_line(
        m.frames(), kernel, [&](std::size_t t) { return m(k, t); },
        [&](std::size_t t, double v) { out(k, t) = v; }, buf);
  }
  return out;
}

RealGrid median_along_frequency(const RealGrid& m, int kernel) {
  RealGrid out(m.bins(), m.frames());
  std::vector<double> buf;
  for (std::size_t t = 0; t < m.frames(); ++t) {
    median_line(
        m.bins(), kernel, [&](std::size_t k) { return m(k, t); },
        [&](std::size_t k, double v) { out(k, t) = v; }, buf);
  }
  return out;
}

MedianMasks median_filter_hpss(const Spectrogram& X, const MedianConfig& mc) {
  validate(mc);
  if (X.empty()) throw InvalidArgument("median_filter_hpss: empty spectrogram");
  const RealGrid mag = magnitude(X);
  MedianMasks out;
  out.harmonic_mag = median_along_time(mag, mc.harm_kernel);
  out.percussive_mag = median_along_frequency(mag, mc.perc_kernel);
  out.mask_h = RealGrid(X.bins(), X.frames());
  auto hs = out.harmonic_mag.values();
  auto ps = out.percussive_mag.values();
  auto ms = out.mask_h.values();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double h = std::pow(hs[i], mc.mask_power);
    const double p = std::pow(ps[i], mc.mask_power);
    ms[i] = (h + p > 0.0) ? h / (h + p) : 0.5;
  }
  return out;
}

Spectrogram apply_mask(const Spectrogram& X, const RealGrid& mask) {
  if (!X.same_shape(mask)) throw ShapeError("mask shape mismatch");
  Spectrogram Y = X;
  auto ys = Y.values();
  auto ms = mask.values();
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] *= ms[i];
  return Y;
}

SignalPair mf_separate(const Signal& x, const StftConfig& c, const MedianConfig& mc) {
  validate(x);
  const Spectrogram X = forward(x, c);
  const MedianMasks masks = median_filter_hpss(X, mc);
  SignalPair out;
  out.harmonic = Signal{adjoint(apply_mask(X, masks.mask_h), c), x.sample_rate};
  out.percussive = Signal{std::vector<double>(x.size()), x.sample_rate};
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.percussive.samples[i] = x.samples[i] - out.harmonic.samples[i];
  }
  return out;
}

RealGrid compute_weight(const Spectrogram& pre_h, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  RealGrid W(pre_h.bins(), pre_h.frames(), 1.0);
  const RealGrid mag = magnitude(pre_h);
  double peak = 0.0;
  for (double v : mag.values()) peak = std::max(peak, v);
  if (peak == 0.0) return W;
  auto ms = mag.values();
  auto ws = W.values();
  for (std::size_t i = 0; i < ws.size(); ++i) ws[i] = kappa / std::max(kappa, ms[i] / peak);
  return W;
}

} // namespace phasehpss
