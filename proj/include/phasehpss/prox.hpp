#pragma once

#include <span>

#include "phasehpss/signal.hpp"
#include "phasehpss/spectrogram.hpp"

namespace phasehpss {

// Euclidean projection onto {(h, p) : h + p = x}:
// (h, p) + (x - h - p) / 2, with p then recomputed as x - h.
SignalPair project_sum(std::span<const double> x, const SignalPair& pair);
void project_sum_inplace(std::span<const double> x, std::vector<double>& h,
                         std::vector<double>& p);

// prox of rho * (1/2)||.||^2: X / (1 + rho).
Spectrogram prox_sq_fro(const Spectrogram& X, double rho);

// prox of rho * ||.||_{2,1}: frame t scaled by (1 - rho / ||X_t||)_+.
// Frame norms are the weighted (two-sided) norms of `frame_norm`.
Spectrogram prox_l21(const Spectrogram& X, double rho);
void prox_l21_inplace(Spectrogram& X, double rho);

// sum_t ||X_t||, same frame norm as prox_l21.
double l21_norm(const Spectrogram& X);

// Projection of every frame onto the ball of radius r. This is the prox of
// the conjugate of r * ||.||_{2,1}.
void project_l2inf_ball_inplace(Spectrogram& X, double radius);

} // namespace phasehpss
