#pragma once

#include <span>
#include <vector>

#include "phasehpss/signal.hpp"

namespace phasehpss {

struct SourceScores {
  double sdr = 0.0;
  double sir = 0.0;
  double sar = 0.0;
};

struct EvalResult {
  std::vector<SourceScores> sources; // in reference order
  bool regularized = false;          // a ridge was needed for some solve
};

inline constexpr int kDefaultFilterLen = 512;

// BSS-Eval decomposition of each estimate into target, interference and
// artifact parts by least-squares projection onto filter_len delayed copies
// of the matching reference and of all references. Ratios are capped at
// 300 dB when an error term vanishes.
EvalResult bss_eval(const std::vector<std::vector<double>>& refs,
                    const std::vector<std::vector<double>>& ests,
                    int filter_len = kDefaultFilterLen);

// Harmonic / percussive scores in the table layout used by the CLI.
struct HpScores {
  SourceScores harmonic;
  SourceScores percussive;
  SourceScores average() const;
};

HpScores bss_eval_hp(std::span<const double> ref_h, std::span<const double> ref_p,
                     std::span<const double> est_h, std::span<const double> est_p,
                     int filter_len = kDefaultFilterLen);

} // namespace phasehpss
