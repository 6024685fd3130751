#include "phasehpss/hpss.hpp"

#include "phasehpss/error.hpp"

namespace phasehpss {

void validate(const HpssConfig& cfg) {
  if (cfg.win_len < 2 || cfg.win_len % 2 != 0) {
    throw InvalidArgument("window length must be even and >= 2");
  }
  if (cfg.hop == 0 || cfg.hop > cfg.win_len || cfg.win_len % cfg.hop != 0) {
    throw InvalidArgument("hop must be positive and divide the window length");
  }
  if (!(cfg.kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (!(cfg.if_eps >= 0.0)) throw InvalidArgument("if_eps must be non-negative");
  validate(cfg.solver);
  validate(cfg.median);
}

HpssProblem build_problem(const Signal& x, const HpssConfig& cfg,
                          const std::optional<Signal>& oracle_h, SignalPair* mf_init) {
  validate(cfg);
  validate(x);
  HpssProblem p;
  p.mixture = x;
  p.stft = StftConfig::hann(cfg.win_len, cfg.hop);
  p.params = cfg.solver;

  const Signal* if_input = &x;
  if (cfg.if_source == IfSource::Oracle) {
    if (!oracle_h) throw InvalidArgument("oracle IF source selected but no oracle signal given");
    if (oracle_h->size() != x.size() || oracle_h->sample_rate != x.sample_rate) {
      throw ShapeError("oracle signal length or rate differs from the mixture");
    }
    if_input = &*oracle_h;
  }
  p.correction = build_correction(estimate_if(if_input->view(), p.stft, cfg.if_eps), p.stft);

  const Spectrogram X = forward(x, p.stft);
  const MedianMasks masks = median_filter_hpss(X, cfg.median);
  const Spectrogram pre_h = apply_mask(X, masks.mask_h);
  p.weight = compute_weight(pre_h, cfg.kappa);

  if (mf_init) {
    mf_init->harmonic = Signal{adjoint(pre_h, p.stft), x.sample_rate};
    mf_init->percussive = Signal{std::vector<double>(x.size()), x.sample_rate};
    for (std::size_t i = 0; i < x.size(); ++i) {
      mf_init->percussive.samples[i] = x.samples[i] - mf_init->harmonic.samples[i];
    }
  }
  return p;
}

SeparationResult separate(const Signal& x, const HpssConfig& cfg,
                          const std::optional<Signal>& oracle_h) {
  SignalPair init;
  const HpssProblem p = build_problem(x, cfg, oracle_h, &init);
  SolverResult r = run(p, init);
  return SeparationResult{std::move(r.pair), std::move(r.trace)};
}

} // namespace phasehpss
