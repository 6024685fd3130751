#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "phasehpss/baseline.hpp"
#include "phasehpss/phase.hpp"
#include "phasehpss/solver.hpp"

namespace phasehpss {

enum class IfSource { Mixture, Oracle };

struct HpssConfig {
  std::size_t win_len = 4096;
  std::size_t hop = 1024;
  double kappa = 0.001;
  SolverParams solver;
  MedianConfig median;
  IfSource if_source = IfSource::Mixture;
  double if_eps = kDefaultIfEps;
};

void validate(const HpssConfig& cfg);

// Flat `key = value` file; '#' starts a comment. Keys: win_len, hop, kappa,
// lambda, mu1, mu2, alpha, n_iters, harm_kernel, perc_kernel, mask_power,
// if_source (mixture|oracle), if_eps. Unknown keys are an error.
HpssConfig parse_config(std::istream& in, HpssConfig base = {});
HpssConfig load_config(const std::filesystem::path& path, HpssConfig base = {});

struct SeparationResult {
  SignalPair pair;
  SolverTrace trace;
};

// STFT, IF estimate (from `x`, or from `oracle_h` when if_source is Oracle),
// phase correction, median-filter initialisation and weight, then the
// primal-dual solver.
SeparationResult separate(const Signal& x, const HpssConfig& cfg,
                          const std::optional<Signal>& oracle_h = std::nullopt);

// Assembles the solver problem without running it.
HpssProblem build_problem(const Signal& x, const HpssConfig& cfg,
                          const std::optional<Signal>& oracle_h,
                          SignalPair* mf_init = nullptr);

} // namespace phasehpss
