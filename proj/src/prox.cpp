#include "phasehpss/prox.hpp"

#include <cmath>

#include "phasehpss/error.hpp"

namespace phasehpss {

void project_sum_inplace(std::span<const double> x, std::vector<double>& h,
                         std::vector<double>& p) {
  if (h.size() != x.size() || p.size() != x.size()) {
    throw ShapeError("project_sum: length mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    h[i] += 0.5 * (x[i] - h[i] - p[i]);
    // Recomputing p from h keeps h + p == x up to a single rounding.
    p[i] = x[i] - h[i];
  }
}

SignalPair project_sum(std::span<const double> x, const SignalPair& pair) {
  SignalPair out = pair;
  project_sum_inplace(x, out.harmonic.samples, out.percussive.samples);
  return out;
}

Spectrogram prox_sq_fro(const Spectrogram& X, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("prox_sq_fro: rho must be positive");
  Spectrogram Y = X;
  scale(Y, 1.0 / (1.0 + rho));
  return Y;
}

void prox_l21_inplace(Spectrogram& X, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("prox_l21: rho must be positive");
  for (std::size_t t = 0; t < X.frames(); ++t) {
    const double n = frame_norm(X, t);
    const double factor = n > rho ? 1.0 - rho / n : 0.0;
    for (auto& v : X.frame(t)) v *= factor;
  }
}

Spectrogram prox_l21(const Spectrogram& X, double rho) {
  Spectrogram Y = X;
  prox_l21_inplace(Y, rho);
  return Y;
}

double l21_norm(const Spectrogram& X) {
  double acc = 0.0;
  for (std::size_t t = 0; t < X.frames(); ++t) acc += frame_norm(X, t);
  return acc;
}

void project_l2inf_ball_inplace(Spectrogram& X, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("ball radius must be non-negative");
  for (std::size_t t = 0; t < X.frames(); ++t) {
    const double n = frame_norm(X, t);
    if (n > radius) {
      const double factor = radius / n;
      for (auto& v : X.frame(t)) v *= factor;
    }
  }
}

} // namespace phasehpss
