#include "phasehpss/solver.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "phasehpss/error.hpp"
#include "phasehpss/prox.hpp"

namespace phasehpss {

void validate(const SolverParams& p) {
  if (!(p.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (!(p.mu1 > 0.0)) throw InvalidArgument("mu1 must be positive");
  if (!(p.mu2 > 0.0)) throw InvalidArgument("mu2 must be positive");
  if (!(p.alpha > 0.0 && p.alpha < 2.0)) throw InvalidArgument("alpha must lie in (0, 2)");
  if (p.n_iters < 0) throw InvalidArgument("n_iters must be non-negative");
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
  out << "iteration,total,smooth_term,sparse_term,primal_increment\n";
  out << std::setprecision(17);
  for (const auto& r : trace.rows) {
    out << r.iteration << ',' << r.total << ',' << r.smooth << ',' << r.sparse << ','
        << r.primal_increment << '\n';
  }
}

void validate(const HpssProblem& p) {
  validate(p.mixture);
  validate(p.stft);
  validate(p.params);
  const std::size_t K = p.n_bins();
  const std::size_t T = p.n_frames();
  if (p.correction.e.bins() != K || p.correction.e.frames() != T) {
    throw ShapeError("phase correction shape does not match the problem");
  }
  if (p.weight.bins() != K || p.weight.frames() != T) {
    throw ShapeError("weight shape does not match the problem");
  }
  for (double w : p.weight.values()) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and >= 0");
  }
}

HpssProblem make_plain_problem(Signal mixture, StftConfig stft, SolverParams params) {
  HpssProblem p;
  p.mixture = std::move(mixture);
  p.stft = std::move(stft);
  p.params = params;
  const std::size_t K = p.n_bins();
  const std::size_t T = p.n_frames();
  p.correction = identity_correction(K, T);
  p.weight = RealGrid(K, T, 1.0);
  return p;
}

namespace {

void apply_weight(Spectrogram& X, const RealGrid& W) {
  if (!X.same_shape(W)) throw ShapeError("weight shape mismatch");
  auto xs = X.values();
  auto ws = W.values();
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] *= ws[i];
}

void check_length(std::span<const double> v, const HpssProblem& p) {
  if (v.size() != p.mixture.size()) throw ShapeError("signal length does not match mixture");
}

double sum_sq(std::span<const double> v) {
  double acc = 0.0;
  for (double a : v) acc += a * a;
  return acc;
}

} // namespace

Spectrogram apply_lh(std::span<const double> xh, const HpssProblem& p) {
  check_length(xh, p);
  Spectrogram X = forward(xh, p.stft);
  apply_correction(X, p.correction);
  time_diff_inplace(X);
  apply_weight(X, p.weight);
  return X;
}

std::vector<double> apply_lh_adj(const Spectrogram& Y, const HpssProblem& p) {
  if (Y.bins() != p.n_bins() || Y.frames() != p.n_frames()) {
    throw ShapeError("spectrogram shape does not match the problem");
  }
  Spectrogram Z = Y;
  Z.signal_length = p.mixture.size();
  apply_weight(Z, p.weight);
  time_diff_adj_inplace(Z);
  apply_correction_conj(Z, p.correction);
  return adjoint(Z, p.stft);
}

double estimate_opnorm(const HpssProblem& p, int n_power_iters, OpNormBranches branches,
                       std::uint64_t seed) {
  if (n_power_iters < 1) throw InvalidArgument("need at least one power iteration");
  const std::size_t n = p.mixture.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> vh(n, 0.0), vp(n, 0.0);
  if (branches.harmonic) for (auto& v : vh) v = gauss(rng);
  if (branches.percussive) for (auto& v : vp) v = gauss(rng);

  auto normalize = [&](double total) {
    const double inv = 1.0 / std::sqrt(total);
    for (auto& v : vh) v *= inv;
    for (auto& v : vp) v *= inv;
  };
  double total = sum_sq(vh) + sum_sq(vp);
  if (total == 0.0) return 0.0;
  normalize(total);

  double rayleigh = 0.0;
  for (int it = 0; it < n_power_iters; ++it) {
    // v <- A^* A v; the Rayleigh quotient <v, A^* A v> = ||A v||^2.
    double image = 0.0;
    if (branches.harmonic) {
      Spectrogram Y = apply_lh(vh, p);
      image += norm_sq(Y);
      vh = apply_lh_adj(Y, p);
    }
    if (branches.percussive) {
      Spectrogram Y = forward(vp, p.stft);
      image += norm_sq(Y);
      vp = adjoint(Y, p.stft);
    }
    rayleigh = image;
    total = sum_sq(vh) + sum_sq(vp);
    if (total == 0.0) return 0.0;
    normalize(total);
  }
  return std::sqrt(rayleigh);
}

ObjectiveValue objective(const SignalPair& pair, const HpssProblem& p) {
  const auto& h = pair.harmonic.samples;
  const auto& q = pair.percussive.samples;
  const auto& x = p.mixture.samples;
  check_length(h, p);
  check_length(q, p);
  double violation = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    violation = std::max(violation, std::abs(x[i] - h[i] - q[i]));
  }
  if (violation > 1e-9 * std::max(norm(x), std::numeric_limits<double>::min())) {
    throw InvalidArgument("pair does not satisfy x_h + x_p = x");
  }
  ObjectiveValue v;
  v.smooth = 0.5 * norm_sq(apply_lh(h, p));
  v.sparse = p.params.lambda * l21_norm(forward(q, p.stft));
  v.total = v.smooth + v.sparse;
  return v;
}

SolverState initial_state(const HpssProblem& p, const SignalPair& init) {
  check_length(init.harmonic.samples, p);
  check_length(init.percussive.samples, p);
  SolverState s;
  s.xh = init.harmonic.samples;
  s.xp = init.percussive.samples;
  project_sum_inplace(p.mixture.samples, s.xh, s.xp);
  const std::size_t K = p.n_bins();
  const std::size_t T = p.n_frames();
  s.yh = Spectrogram(K, T, p.mixture.size());
  s.yp = Spectrogram(K, T, p.mixture.size());
  return s;
}

double step(const HpssProblem& p, SolverState& s) {
  const auto& x = p.mixture.samples;
  const std::size_t n = x.size();
  const double mu1 = p.params.mu1;
  const double mu2 = p.params.mu2;
  const double alpha = p.params.alpha;
  const double lambda = p.params.lambda;

  // Primal: projected step along the adjoint of the dual variables.
  const auto gh = apply_lh_adj(s.yh, p);
  const auto gp = adjoint(s.yp, p.stft);
  std::vector<double> th(n), tp(n);
  for (std::size_t i = 0; i < n; ++i) {
    th[i] = s.xh[i] - mu1 * gh[i];
    tp[i] = s.xp[i] - mu1 * gp[i];
  }
  project_sum_inplace(x, th, tp);

  // Dual: z = y + mu2 L(2 x~ - x), then y~ = z - mu2 prox_{f / mu2}(z / mu2).
  std::vector<double> dh(n), dp(n);
  for (std::size_t i = 0; i < n; ++i) {
    dh[i] = 2.0 * th[i] - s.xh[i];
    dp[i] = 2.0 * tp[i] - s.xp[i];
  }
  Spectrogram zh = s.yh;
  axpy(mu2, apply_lh(dh, p), zh);
  Spectrogram zp = s.yp;
  axpy(mu2, forward(dp, p.stft), zp);

  // Moreau form evaluated in place: z - mu2 * prox_{f/mu2}(z / mu2).
  // Harmonic: f = (1/2)||.||^2, prox_{rho f}(u) = u / (1 + rho).
  {
    const double shrink = 1.0 / (1.0 + 1.0 / mu2);
    for (auto& v : zh.values()) v -= mu2 * (v / mu2) * shrink;
  }
  // Percussive: f = lambda ||.||_{2,1}, frame-wise shrinkage of z / mu2 with
  // threshold lambda / mu2.
  for (std::size_t t = 0; t < zp.frames(); ++t) {
    const double u_norm = frame_norm(zp, t) / mu2;
    const double thresh = lambda / mu2;
    const double keep = u_norm > thresh ? 1.0 - thresh / u_norm : 0.0;
    for (auto& v : zp.frame(t)) v -= mu2 * keep * (v / mu2);
  }

  // Relaxation of (x, y) as one vector; x_p follows from the constraint.
  double inc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = alpha * th[i] + (1.0 - alpha) * s.xh[i];
    const double q = x[i] - h;
    const double dhh = h - s.xh[i];
    const double dqq = q - s.xp[i];
    inc += dhh * dhh + dqq * dqq;
    s.xh[i] = h;
    s.xp[i] = q;
  }
  scale(s.yh, 1.0 - alpha);
  axpy(alpha, zh, s.yh);
  scale(s.yp, 1.0 - alpha);
  axpy(alpha, zp, s.yp);
  return std::sqrt(inc);
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double a : v) {
    if (!std::isfinite(a)) return false;
  }
  return true;
}

bool all_finite(const Spectrogram& X) {
  for (const auto& v : X.values()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

SignalPair to_pair(const SolverState& s, int rate) {
  return SignalPair{Signal{s.xh, rate}, Signal{s.xp, rate}};
}

} // namespace

SolverResult run(const HpssProblem& p, const SignalPair& init,
                 const IterationCallback& on_iteration) {
  validate(p);
  SolverResult result;
  result.state = initial_state(p, init);
  auto& s = result.state;
  const int rate = p.mixture.sample_rate;

  if (p.params.n_iters > 0) {
    const double opnorm = estimate_opnorm(p, 20);
    const double product = p.params.mu1 * p.params.mu2 * opnorm * opnorm;
    if (product > 1.0) {
      std::ostringstream msg;
      msg << "step sizes may be too large: mu1*mu2*||L||^2 = " << product << " > 1";
      result.trace.warnings.push_back(msg.str());
      std::cerr << "warning: " << msg.str() << '\n';
    }
  }

  for (int it = 1; it <= p.params.n_iters; ++it) {
    const double inc = step(p, s);
    if (!std::isfinite(inc) || !all_finite(s.xh) || !all_finite(s.yh) ||
        !all_finite(s.yp)) {
      throw DivergenceError("solver diverged at iteration " + std::to_string(it), it);
    }
    if (p.params.record_trace) {
      const auto obj = objective(to_pair(s, rate), p);
      result.trace.rows.push_back({it, obj.total, obj.smooth, obj.sparse, inc});
    }
    if (on_iteration) on_iteration(it, s);
  }
  result.pair = to_pair(s, rate);
  return result;
}

} // namespace phasehpss
