#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "phasehpss/phase.hpp"
#include "phasehpss/signal.hpp"
#include "phasehpss/spectrogram.hpp"
#include "phasehpss/stft.hpp"

namespace phasehpss {

struct SolverParams {
  double lambda = 0.5; // weight of the frame-sparsity term
  double mu1 = 1.0;    // primal step
  double mu2 = 0.25;   // dual step
  double alpha = 0.5;  // relaxation, in (0, 2)
  int n_iters = 100;
  bool record_trace = true;
};

void validate(const SolverParams& p);

struct TraceRow {
  int iteration = 0;
  double total = 0.0;
  double smooth = 0.0;
  double sparse = 0.0;
  double primal_increment = 0.0;
};

struct SolverTrace {
  std::vector<TraceRow> rows;
  std::vector<std::string> warnings;
};

// iteration,total,smooth_term,sparse_term,primal_increment
void write_trace_csv(std::ostream& out, const SolverTrace& trace);

// Everything the iteration needs, fixed for the whole run.
struct HpssProblem {
  Signal mixture;
  StftConfig stft;
  PhaseCorrection correction;
  RealGrid weight; // W, entries in (0, 1]
  SolverParams params;

  std::size_t n_bins() const noexcept { return stft.n_bins(); }
  std::size_t n_frames() const noexcept { return stft.n_frames(mixture.size()); }
};

void validate(const HpssProblem& p);

// Builds a problem with E == 1 and W == 1.
HpssProblem make_plain_problem(Signal mixture, StftConfig stft,
                               SolverParams params = {});

// L_h(x_h) = W (.) D_t(E (.) F(x_h)).
Spectrogram apply_lh(std::span<const double> xh, const HpssProblem& p);
// L_h^*(Y) = F^*(conj(E) (.) D_t^*(W (.) Y)).
std::vector<double> apply_lh_adj(const Spectrogram& Y, const HpssProblem& p);

struct OpNormBranches {
  bool harmonic = true;   // include L_h
  bool percussive = true; // include F
};

// Power-iteration estimate of the spectral norm of
// (x_h, x_p) -> (L_h x_h, F x_p). Deterministic for a given seed.
double estimate_opnorm(const HpssProblem& p, int n_power_iters,
                       OpNormBranches branches = {}, std::uint64_t seed = 1);

struct ObjectiveValue {
  double total = 0.0;
  double smooth = 0.0; // (1/2) ||L_h x_h||^2
  double sparse = 0.0; // lambda ||F x_p||_{2,1}
};

// Throws InvalidArgument when the pair violates x_h + x_p = x by more than
// 1e-9 * ||x||.
ObjectiveValue objective(const SignalPair& pair, const HpssProblem& p);

// Primal and dual iterates.
struct SolverState {
  std::vector<double> xh;
  std::vector<double> xp;
  Spectrogram yh;
  Spectrogram yp;
};

// Projects `init` onto the constraint set and zeroes the duals.
SolverState initial_state(const HpssProblem& p, const SignalPair& init);

// One relaxed primal-dual iteration. Returns the primal increment norm.
double step(const HpssProblem& p, SolverState& state);

struct SolverResult {
  SignalPair pair;
  SolverTrace trace;
  SolverState state;
};

// Per-iteration observer; gets the 1-based iteration index.
using IterationCallback = std::function<void(int, const SolverState&)>;

// Runs params.n_iters iterations from `init`. Throws DivergenceError on a
// non-finite iterate.
SolverResult run(const HpssProblem& p, const SignalPair& init,
                 const IterationCallback& on_iteration = {});

} // namespace phasehpss
