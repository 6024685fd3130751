#include <catch_amalgamated.hpp>

#include <sstream>

#include "phasehpss/error.hpp"
#include "phasehpss/hpss.hpp"
#include "phasehpss/synth.hpp"
#include "util.hpp"

using namespace phasehpss;

namespace {

HpssConfig small_config() {
  HpssConfig cfg;
  cfg.win_len = 256;
  cfg.hop = 64;
  cfg.solver.n_iters = 20;
  return cfg;
}

synth::Track small_track() {
  const std::size_t n = 8000;
  return synth::mix_equal_energy("t", synth::on_bin_sinusoid(12, 256, n, 16000, 0.5, 0.1),
                                 synth::impulse_train(n, 2000, 700, 16000));
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(b[i]));
  }
  return m / s;
}

} // namespace

TEST_CASE("separate is deterministic and reconstructs the mixture exactly") {
  const auto t = small_track();
  const HpssConfig cfg = small_config();
  const SeparationResult a = separate(t.mixture, cfg);
  const SeparationResult b = separate(t.mixture, cfg);
  CHECK(a.pair.harmonic.samples == b.pair.harmonic.samples);
  CHECK(a.pair.percussive.samples == b.pair.percussive.samples);
  for (std::size_t i = 0; i < t.mixture.size(); ++i) {
    CHECK(a.pair.percussive.samples[i] == t.mixture.samples[i] - a.pair.harmonic.samples[i]);
  }
  CHECK(a.trace.rows.size() == 20);
}

TEST_CASE("scaling the mixture and lambda together scales the output") {
  const auto t = small_track();
  HpssConfig cfg = small_config();
  const SeparationResult base = separate(t.mixture, cfg);
  for (double alpha : {0.1, 3.0}) {
    Signal x = t.mixture;
    for (auto& v : x.samples) v *= alpha;
    HpssConfig scaled = cfg;
    scaled.solver.lambda *= alpha;
    SeparationResult r = separate(x, scaled);
    for (auto& v : r.pair.harmonic.samples) v /= alpha;
    CHECK(max_rel(r.pair.harmonic.samples, base.pair.harmonic.samples) <= 1e-6);
  }
}

TEST_CASE("zero iterations reproduce the median-filter initialisation") {
  const auto t = small_track();
  HpssConfig cfg = small_config();
  cfg.solver.n_iters = 0;
  const SeparationResult r = separate(t.mixture, cfg);
  const SignalPair mf = mf_separate(t.mixture, StftConfig::hann(256, 64), cfg.median);
  for (std::size_t i = 0; i < t.mixture.size(); ++i) {
    CHECK(r.pair.harmonic.samples[i] == Catch::Approx(mf.harmonic.samples[i]).margin(1e-14));
  }
}

TEST_CASE("oracle IF source needs a matching oracle signal") {
  const auto t = small_track();
  HpssConfig cfg = small_config();
  cfg.if_source = IfSource::Oracle;
  CHECK_THROWS_AS(separate(t.mixture, cfg), InvalidArgument);
  Signal short_h = t.harmonic;
  short_h.samples.pop_back();
  CHECK_THROWS_AS(separate(t.mixture, cfg, short_h), ShapeError);
  const SeparationResult r = separate(t.mixture, cfg, t.harmonic);
  CHECK(r.pair.harmonic.size() == t.mixture.size());
}

TEST_CASE("oracle and mixture IF give the same problem for a harmonic-only input") {
  const Signal x = synth::on_bin_sinusoid(12, 256, 4000, 16000);
  HpssConfig cfg = small_config();
  const HpssProblem a = build_problem(x, cfg, std::nullopt);
  cfg.if_source = IfSource::Oracle;
  const HpssProblem b = build_problem(x, cfg, x);
  CHECK(a.correction.e == b.correction.e);
  CHECK(a.weight == b.weight);
}

TEST_CASE("the weight comes from the median-filter harmonic estimate") {
  const auto t = small_track();
  HpssConfig cfg = small_config();
  SignalPair init;
  const HpssProblem p = build_problem(t.mixture, cfg, std::nullopt, &init);
  const Spectrogram X = forward(t.mixture, p.stft);
  const MedianMasks mm = median_filter_hpss(X, cfg.median);
  CHECK(p.weight == compute_weight(apply_mask(X, mm.mask_h), cfg.kappa));
  for (std::size_t i = 0; i < t.mixture.size(); ++i) {
    CHECK(init.percussive.samples[i] == t.mixture.samples[i] - init.harmonic.samples[i]);
  }
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment line\n"
      "win_len = 2048\n"
      "hop=512  # trailing comment\n"
      "kappa = 0.01\n"
      "lambda = 0.25\n"
      "mu1 = 0.5\n"
      "mu2 = 0.5\n"
      "alpha = 1.5\n"
      "n_iters = 7\n"
      "harm_kernel = 9\n"
      "perc_kernel = 11\n"
      "mask_power = 1\n"
      "if_source = oracle\n"
      "if_eps = 1e-5\n"
      "\n");
  const HpssConfig cfg = parse_config(in);
  CHECK(cfg.win_len == 2048);
  CHECK(cfg.hop == 512);
  CHECK(cfg.kappa == 0.01);
  CHECK(cfg.solver.lambda == 0.25);
  CHECK(cfg.solver.mu1 == 0.5);
  CHECK(cfg.solver.mu2 == 0.5);
  CHECK(cfg.solver.alpha == 1.5);
  CHECK(cfg.solver.n_iters == 7);
  CHECK(cfg.median.harm_kernel == 9);
  CHECK(cfg.median.perc_kernel == 11);
  CHECK(cfg.median.mask_power == 1.0);
  CHECK(cfg.if_source == IfSource::Oracle);
  CHECK(cfg.if_eps == 1e-5);
}

TEST_CASE("config defaults are the method defaults and overrides are partial") {
  const HpssConfig d;
  CHECK(d.win_len == 4096);
  CHECK(d.hop == 1024);
  CHECK(d.kappa == 0.001);
  CHECK(d.solver.lambda == 0.5);
  CHECK(d.solver.mu1 == 1.0);
  CHECK(d.solver.mu2 == 0.25);
  CHECK(d.solver.alpha == 0.5);
  CHECK(d.solver.n_iters == 100);

  HpssConfig base;
  base.solver.lambda = 0.9;
  std::istringstream in("kappa = 0.002\n");
  const HpssConfig cfg = parse_config(in, base);
  CHECK(cfg.solver.lambda == 0.9);
  CHECK(cfg.kappa == 0.002);
}

TEST_CASE("config errors") {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  CHECK_THROWS_AS(parse("bogus = 1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("lambda 0.5\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("lambda = abc\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("n_iters = 1.5\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("win_len = 1000\nhop = 300\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("if_source = psychic\n"), InvalidArgument);
  CHECK_THROWS_AS(load_config("/nonexistent/phasehpss.cfg"), IoError);
}
