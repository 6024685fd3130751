#include "phasehpss/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

#include "fft.hpp"
#include "phasehpss/error.hpp"

namespace phasehpss {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kCapDb = 300.0;

double ratio_db(double num, double den) {
  if (num <= 0.0) return -kCapDb;
  if (den <= num * 1e-30) return kCapDb;
  return 10.0 * std::log10(num / den);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 2;
  while (p < n) p <<= 1;
  return p;
}

// Zero-padded spectra of length-nfft FFTs, reused for correlations and
// convolutions.
class Spectra {
public:
  explicit Spectra(std::size_t nfft) : fft_(nfft) {}

  std::vector<std::complex<double>> of(std::span<const double> x) {
    auto buf = fft_.real();
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy(x.begin(), x.end(), buf.begin());
    fft_.forward();
    auto spec = fft_.spectrum();
    return {spec.begin(), spec.end()};
  }

  // Real inverse, divided by nfft.
  std::vector<double> inverse(const std::vector<std::complex<double>>& spec) {
    std::copy(spec.begin(), spec.end(), fft_.spectrum().begin());
    fft_.inverse();
    const double inv = 1.0 / static_cast<double>(fft_.size());
    std::vector<double> out(fft_.size());
    auto buf = fft_.real();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i] * inv;
    return out;
  }

  std::size_t size() const { return fft_.size(); }

private:
  detail::RealFft fft_;
};

// c(tau) = sum_n a(n) b(n + tau), returned for tau in (-F, F) at index tau + F - 1.
std::vector<double> xcorr(Spectra& sp, const std::vector<std::complex<double>>& A,
                          const std::vector<std::complex<double>>& B, int F) {
  std::vector<std::complex<double>> prod(A.size());
  for (std::size_t k = 0; k < A.size(); ++k) prod[k] = std::conj(A[k]) * B[k];
  const auto circ = sp.inverse(prod);
  const auto n = static_cast<std::ptrdiff_t>(sp.size());
  std::vector<double> out(2 * F - 1);
  for (int tau = -(F - 1); tau <= F - 1; ++tau) {
    out[tau + F - 1] = circ[static_cast<std::size_t>((tau + n) % n)];
  }
  return out;
}

// Cholesky solve with a small ridge fallback for singular Gram matrices.
VectorXd solve_gram(const MatrixXd& G, const VectorXd& d, bool& regularized) {
  Eigen::LLT<MatrixXd> llt(G);
  if (llt.info() == Eigen::Success) {
    VectorXd c = llt.solve(d);
    if (c.allFinite()) return c;
  }
  regularized = true;
  const double ridge = 1e-10 * std::max(G.trace() / G.rows(), 1e-300);
  MatrixXd R = G;
  R.diagonal().array() += ridge;
  return R.ldlt().solve(d);
}

} // namespace

EvalResult bss_eval(const std::vector<std::vector<double>>& refs,
                    const std::vector<std::vector<double>>& ests, int filter_len) {
  if (filter_len < 1) throw InvalidArgument("filter length must be >= 1");
  if (refs.empty() || refs.size() != ests.size()) {
    throw ShapeError("need one estimate per reference");
  }
  const std::size_t N = refs.front().size();
  if (N == 0) throw InvalidArgument("empty reference");
  for (const auto& r : refs) {
    if (r.size() != N) throw ShapeError("reference lengths differ");
  }
  for (const auto& e : ests) {
    if (e.size() != N) throw ShapeError("estimate length differs from references");
  }

  const int F = filter_len;
  const std::size_t m = refs.size();
  const std::size_t M = N + F - 1;
  Spectra sp(next_pow2(N + F));

  std::vector<std::vector<std::complex<double>>> S;
  for (const auto& r : refs) S.push_back(sp.of(r));

  // Gram matrix of all delayed references: G[(i,a),(j,b)] = c_ij(a - b).
  const auto dim = static_cast<Eigen::Index>(m * F);
  MatrixXd G(dim, dim);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const auto c = xcorr(sp, S[i], S[j], F);
      for (int a = 0; a < F; ++a) {
        for (int b = 0; b < F; ++b) {
          const double v = c[a - b + F - 1];
          G(i * F + a, j * F + b) = v;
          G(j * F + b, i * F + a) = v;
        }
      }
    }
  }

  EvalResult result;
  for (std::size_t j = 0; j < m; ++j) {
    const auto E = sp.of(ests[j]);
    // D[(i,a)] = sum_n s_i(n - a) e(n) = c_{s_i, e}(a).
    VectorXd D(dim);
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = xcorr(sp, S[i], E, F);
      for (int a = 0; a < F; ++a) D(i * F + a) = c[a + F - 1];
    }

    const VectorXd c_all = solve_gram(G, D, result.regularized);
    const VectorXd c_tgt = solve_gram(G.block(j * F, j * F, F, F), D.segment(j * F, F),
                                      result.regularized);

    // Projections as FIR filtering of the references.
    std::vector<std::complex<double>> P_all(S[0].size()), P_tgt(S[0].size());
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> taps(c_all.data() + i * F, c_all.data() + (i + 1) * F);
      const auto H = sp.of(taps);
      for (std::size_t k = 0; k < H.size(); ++k) P_all[k] += H[k] * S[i][k];
    }
    {
      std::vector<double> taps(c_tgt.data(), c_tgt.data() + F);
      const auto H = sp.of(taps);
      for (std::size_t k = 0; k < H.size(); ++k) P_tgt[k] = H[k] * S[j][k];
    }
    const auto p_all = sp.inverse(P_all);
    const auto p_tgt = sp.inverse(P_tgt);

    double e_target = 0.0, e_interf = 0.0, e_artif = 0.0, e_noise = 0.0, e_signal = 0.0;
    for (std::size_t n = 0; n < M; ++n) {
      const double est = n < N ? ests[j][n] : 0.0;
      const double target = p_tgt[n];
      const double interf = p_all[n] - p_tgt[n];
      const double artif = est - p_all[n];
      e_target += target * target;
      e_interf += interf * interf;
      e_artif += artif * artif;
      e_noise += (interf + artif) * (interf + artif);
      e_signal += (target + interf) * (target + interf);
    }
    SourceScores s;
    s.sdr = ratio_db(e_target, e_noise);
    s.sir = ratio_db(e_target, e_interf);
    s.sar = ratio_db(e_signal, e_artif);
    result.sources.push_back(s);
  }
  return result;
}

SourceScores HpScores::average() const {
  return SourceScores{0.5 * (harmonic.sdr + percussive.sdr),
                      0.5 * (harmonic.sir + percussive.sir),
                      0.5 * (harmonic.sar + percussive.sar)};
}

HpScores bss_eval_hp(std::span<const double> ref_h, std::span<const double> ref_p,
                     std::span<const double> est_h, std::span<const double> est_p,
                     int filter_len) {
  const auto r = bss_eval({{ref_h.begin(), ref_h.end()}, {ref_p.begin(), ref_p.end()}},
                          {{est_h.begin(), est_h.end()}, {est_p.begin(), est_p.end()}},
                          filter_len);
  return HpScores{r.sources[0], r.sources[1]};
}

} // namespace phasehpss
