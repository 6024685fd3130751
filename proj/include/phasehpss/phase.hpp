#pragma once

#include <span>
#include <vector>

#include "phasehpss/signal.hpp"
#include "phasehpss/spectrogram.hpp"
#include "phasehpss/stft.hpp"

namespace phasehpss {

// Per-bin instantaneous frequency in bins of the L-point transform.
struct IfMap {
  RealGrid v;
};

// Unit-modulus correction matrix E; E(w, 0) == 1.
struct PhaseCorrection {
  Grid<cplx> e;
};

inline constexpr double kDefaultIfEps = 1e-6;

// v = w - Im[Fd(x) / F(x)] * L / (2 pi), where Fd uses the derivative window.
// Bins with |F(x)| < eps * max|F(x)| fall back to v = w. The result is clamped
// to [0, L/2].
IfMap estimate_if(std::span<const double> x, const StftConfig& c,
                  double eps = kDefaultIfEps);

// E(w, t) = E(w, t-1) * exp(-2 pi j v(w, t-1) a / L), renormalised to unit
// modulus at every step.
PhaseCorrection build_correction(const IfMap& v, const StftConfig& c);

// Correction that does nothing.
PhaseCorrection identity_correction(std::size_t bins, std::size_t frames);

Spectrogram ipc_forward(std::span<const double> x, const PhaseCorrection& E,
                        const StftConfig& c);
std::vector<double> ipc_adjoint(const Spectrogram& Y, const PhaseCorrection& E,
                                const StftConfig& c);

// In-place E (.) X and conj(E) (.) X.
void apply_correction(Spectrogram& X, const PhaseCorrection& E);
void apply_correction_conj(Spectrogram& X, const PhaseCorrection& E);

// Forward time difference with a zero first column:
// (D X)(w, t) = X(w, t) - X(w, t-1) for t >= 1, (D X)(w, 0) = 0.
Spectrogram time_diff(const Spectrogram& X);
// Adjoint of time_diff: (D* Y)(w, t) = Y(w, t) - Y(w, t+1), with Y(w, 0)
// treated as zero and Y(w, T) as zero.
Spectrogram time_diff_adj(const Spectrogram& Y);

void time_diff_inplace(Spectrogram& X);
void time_diff_adj_inplace(Spectrogram& Y);

} // namespace phasehpss
