#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>

#include "phasehpss/error.hpp"
#include "phasehpss/stft.hpp"
#include "util.hpp"

using namespace phasehpss;
using testutil::rel_diff;

namespace {

// Tight Hann window built directly from the definition.
std::vector<double> oracle_tight_hann(std::size_t L, std::size_t a) {
  std::vector<double> g(L);
  for (std::size_t l = 0; l < L; ++l) {
    g[l] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(l) / double(L));
  }
  std::vector<double> out(L);
  for (std::size_t l = 0; l < L; ++l) {
    double s = 0.0;
    for (std::size_t k = l % a; k < L; k += a) s += g[k] * g[k];
    out[l] = g[l] / std::sqrt(s);
  }
  return out;
}

// Direct O(K T L) evaluation of the one-sided transform.
Spectrogram naive_stft(const std::vector<double>& x, std::size_t L, std::size_t a) {
  const auto g = oracle_tight_hann(L, a);
  const std::size_t K = L / 2 + 1;
  const std::size_t T = (x.size() - 1) / a + L / a;
  const auto pad = static_cast<std::ptrdiff_t>(L - a);
  Spectrogram X(K, T, x.size());
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t w = 0; w < K; ++w) {
      std::complex<double> acc = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(t * a + l) - pad;
        if (n < 0 || n >= static_cast<std::ptrdiff_t>(x.size())) continue;
        acc += x[n] * g[l] * std::polar(1.0, -2.0 * std::numbers::pi * double(w * l) / double(L));
      }
      X(w, t) = acc / std::sqrt(double(L));
    }
  }
  return X;
}

} // namespace

TEST_CASE("tight window has unit squared overlap-add") {
  for (auto [L, a] : {std::pair<std::size_t, std::size_t>{16, 4}, {64, 16}, {4096, 1024},
                      {32, 8}, {30, 10}}) {
    const auto c = StftConfig::hann(L, a);
    for (std::size_t r = 0; r < a; ++r) {
      double s = 0.0;
      for (std::size_t k = r; k < L; k += a) s += c.window[k] * c.window[k];
      CHECK(s == Catch::Approx(1.0).epsilon(1e-14));
    }
    const auto oracle = oracle_tight_hann(L, a);
    for (std::size_t l = 0; l < L; ++l) CHECK(c.window[l] == Catch::Approx(oracle[l]).margin(1e-14));
  }
}

TEST_CASE("derivative window is the sampled analytic derivative, same normalizer") {
  const std::size_t L = 64, a = 16;
  const auto c = StftConfig::hann(L, a);
  const auto hann = make_hann(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double d = std::numbers::pi / L * std::sin(2.0 * std::numbers::pi * l / L);
    if (hann[l] > 1e-3) {
      CHECK(c.deriv_window[l] / c.window[l] == Catch::Approx(d / hann[l]).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward matches a direct DFT evaluation") {
  testutil::Rng rng(11);
  for (auto [L, a, n] : {std::tuple<std::size_t, std::size_t, std::size_t>{16, 4, 37},
                         {32, 8, 100}, {8, 4, 20}, {16, 2, 9}}) {
    const auto x = testutil::random_signal(rng, n);
    const auto c = StftConfig::hann(L, a);
    const Spectrogram X = forward(x, c);
    const Spectrogram ref = naive_stft(x, L, a);
    REQUIRE(X.bins() == ref.bins());
    REQUIRE(X.frames() == ref.frames());
    CHECK(X.signal_length == n);
    CHECK(rel_diff(X, ref) < 1e-13);
  }
}

TEST_CASE("frame geometry") {
  const auto c = StftConfig::hann(4096, 1024);
  CHECK(c.n_bins() == 2049);
  CHECK(c.n_frames(1) == 4);
  CHECK(c.n_frames(1024) == 4);
  CHECK(c.n_frames(1025) == 5);
  for (std::size_t t = 0; t < 10; ++t) CHECK(c.frame_center(t) % 1024 == 0);
  CHECK(c.frame_center(1) == 0);
}

TEST_CASE("adjoint inverts forward for random lengths") {
  testutil::Rng rng(12);
  std::uniform_int_distribution<std::size_t> len(1, 5000);
  for (auto [L, a] : {std::pair<std::size_t, std::size_t>{64, 16}, {256, 64}, {30, 10},
                      {128, 32}, {4096, 1024}}) {
    const auto c = StftConfig::hann(L, a);
    for (int i = 0; i < 5; ++i) {
      const auto x = testutil::random_signal(rng, len(rng));
      const auto y = adjoint(forward(x, c), c);
      REQUIRE(y.size() == x.size());
      CHECK(rel_diff(y, x) <= 1e-12);
    }
  }
}

TEST_CASE("adjoint identity <F x, Y> = <x, F* Y>") {
  testutil::Rng rng(13);
  const auto c = StftConfig::hann(64, 16);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 100 + 37 * i;
    const auto x = testutil::random_signal(rng, n);
    const Spectrogram Y = testutil::random_spec(rng, c.n_bins(), c.n_frames(n), n);
    const double lhs = inner(forward(x, c), Y);
    const double rhs = dot(x, adjoint(Y, c));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs) + 1e-12);
  }
}

TEST_CASE("forward is linear") {
  testutil::Rng rng(14);
  const auto c = StftConfig::hann(64, 16);
  const auto x = testutil::random_signal(rng, 500);
  const auto y = testutil::random_signal(rng, 500);
  const double al = 0.7, be = -2.3;
  std::vector<double> z(500);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = al * x[i] + be * y[i];
  Spectrogram lhs = forward(z, c);
  Spectrogram rhs = forward(x, c);
  scale(rhs, al);
  axpy(be, forward(y, c), rhs);
  CHECK(rel_diff(lhs, rhs) <= 1e-14);
}

TEST_CASE("Parseval with the weighted norm") {
  testutil::Rng rng(15);
  for (std::size_t n : {10u, 999u, 44100u}) {
    const auto x = testutil::random_signal(rng, n);
    const auto c = StftConfig::hann(1024, 256);
    const double e = dot(x, x);
    CHECK(norm_sq(forward(x, c)) == Catch::Approx(e).epsilon(1e-10));
  }
}

TEST_CASE("transform of 100k samples is fast enough for batch use") {
  testutil::Rng rng(16);
  const auto x = testutil::random_signal(rng, 100000);
  const auto c = StftConfig::hann(4096, 1024);
  const auto t0 = std::chrono::steady_clock::now();
  const auto y = adjoint(forward(x, c), c);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(rel_diff(y, x) <= 1e-10);
  CHECK(s < 1.0);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(StftConfig::hann(15, 5), InvalidArgument);
  CHECK_THROWS_AS(StftConfig::hann(16, 5), InvalidArgument);
  CHECK_THROWS_AS(StftConfig::hann(16, 0), InvalidArgument);
  auto c = StftConfig::hann(16, 4);
  c.window.pop_back();
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  const std::vector<double> empty;
  CHECK_THROWS_AS(forward(empty, StftConfig::hann(16, 4)), InvalidArgument);
}

TEST_CASE("adjoint rejects a spectrogram of the wrong shape") {
  const auto c = StftConfig::hann(16, 4);
  Spectrogram Y(c.n_bins() + 1, c.n_frames(40), 40);
  CHECK_THROWS_AS(adjoint(Y, c), ShapeError);
}

TEST_CASE("spectrogram dumps round trip") {
  testutil::Rng rng(17);
  const auto c = StftConfig::hann(32, 8);
  const auto x = testutil::random_signal(rng, 200);
  const Spectrogram X = forward(x, c);
  const auto path = std::filesystem::temp_directory_path() / "phasehpss_dump.bin";
  dump_spectrogram(path, X, c);
  const SpectrogramDump d = load_dump(path);
  CHECK(d.complex_payload);
  CHECK(d.win_len == 32);
  CHECK(d.hop == 8);
  CHECK(d.spec.bins() == X.bins());
  CHECK(d.spec.frames() == X.frames());
  CHECK(static_cast<const Grid<cplx>&>(d.spec) == static_cast<const Grid<cplx>&>(X));

  RealGrid m = magnitude(X);
  dump_real_grid(path, m, c);
  const SpectrogramDump r = load_dump(path);
  CHECK_FALSE(r.complex_payload);
  for (std::size_t t = 0; t < m.frames(); ++t) {
    for (std::size_t w = 0; w < m.bins(); ++w) {
      CHECK(r.spec(w, t) == cplx(m(w, t), 0.0));
    }
  }
  std::filesystem::remove(path);
}
