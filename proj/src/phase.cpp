#include "phasehpss/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phasehpss/error.hpp"

namespace phasehpss {

IfMap estimate_if(std::span<const double> x, const StftConfig& c, double eps) {
  validate(c);
  if (c.deriv_window.size() != c.win_len) {
    throw InvalidArgument("IF estimation needs a derivative window");
  }
  const Spectrogram X = forward(x, c);
  const Spectrogram Xd = forward_with_window(x, c, c.deriv_window);

  double peak = 0.0;
  for (const auto& v : X.values()) peak = std::max(peak, std::abs(v));
  const double floor = eps * peak;
  const double to_bins = static_cast<double>(c.win_len) / (2.0 * std::numbers::pi);
  const double nyquist = static_cast<double>(c.win_len) / 2.0;

  IfMap out{RealGrid(X.bins(), X.frames())};
  for (std::size_t t = 0; t < X.frames(); ++t) {
    for (std::size_t k = 0; k < X.bins(); ++k) {
      const cplx f = X(k, t);
      double v = static_cast<double>(k);
      if (peak > 0.0 && std::abs(f) >= floor && std::abs(f) > 0.0) {
        v -= (Xd(k, t) / f).imag() * to_bins;
        if (!std::isfinite(v)) v = static_cast<double>(k);
      }
      out.v(k, t) = std::clamp(v, 0.0, nyquist);
    }
  }
  return out;
}

PhaseCorrection build_correction(const IfMap& v, const StftConfig& c) {
  const std::size_t K = v.v.bins();
  const std::size_t T = v.v.frames();
  const double rate = -2.0 * std::numbers::pi * static_cast<double>(c.hop) /
                      static_cast<double>(c.win_len);
  PhaseCorrection E{Grid<cplx>(K, T, cplx(1.0, 0.0))};
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t k = 0; k < K; ++k) {
      cplx e = E.e(k, t - 1) * std::polar(1.0, rate * v.v(k, t - 1));
      E.e(k, t) = e / std::abs(e);
    }
  }
  return E;
}

PhaseCorrection identity_correction(std::size_t bins, std::size_t frames) {
  return PhaseCorrection{Grid<cplx>(bins, frames, cplx(1.0, 0.0))};
}

void apply_correction(Spectrogram& X, const PhaseCorrection& E) {
  if (!X.same_shape(E.e)) throw ShapeError("phase correction shape mismatch");
  auto xs = X.values();
  auto es = E.e.values();
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] *= es[i];
}

void apply_correction_conj(Spectrogram& X, const PhaseCorrection& E) {
  if (!X.same_shape(E.e)) throw ShapeError("phase correction shape mismatch");
  auto xs = X.values();
  auto es = E.e.values();
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] *= std::conj(es[i]);
}

Spectrogram ipc_forward(std::span<const double> x, const PhaseCorrection& E,
                        const StftConfig& c) {
  Spectrogram X = forward(x, c);
  apply_correction(X, E);
  return X;
}

std::vector<double> ipc_adjoint(const Spectrogram& Y, const PhaseCorrection& E,
                                const StftConfig& c) {
  Spectrogram Z = Y;
  apply_correction_conj(Z, E);
  return adjoint(Z, c);
}

void time_diff_inplace(Spectrogram& X) {
  const std::size_t T = X.frames();
  if (T == 0) return;
  for (std::size_t t = T - 1; t >= 1; --t) {
    auto cur = X.frame(t);
    auto prev = X.frame(t - 1);
    for (std::size_t k = 0; k < X.bins(); ++k) cur[k] -= prev[k];
  }
  for (auto& v : X.frame(0)) v = 0.0;
}

void time_diff_adj_inplace(Spectrogram& Y) {
  const std::size_t T = Y.frames();
  if (T == 0) return;
  // Ascending t reads Y(., t+1) before it is overwritten.
  for (auto& v : Y.frame(0)) v = 0.0;
  for (std::size_t t = 0; t + 1 < T; ++t) {
    auto cur = Y.frame(t);
    auto next = Y.frame(t + 1);
    for (std::size_t k = 0; k < Y.bins(); ++k) cur[k] -= next[k];
  }
}

Spectrogram time_diff(const Spectrogram& X) {
  Spectrogram D = X;
  time_diff_inplace(D);
  return D;
}

Spectrogram time_diff_adj(const Spectrogram& Y) {
  Spectrogram D = Y;
  time_diff_adj_inplace(D);
  return D;
}

} // namespace phasehpss
