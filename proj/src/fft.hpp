#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace phasehpss::detail {

// Unnormalised real FFT of length n backed by a shared FFTW plan and
// SIMD-aligned buffers owned by the instance.
//
// forward(): spectrum[k] = sum_l real[l] exp(-2 pi j k l / n), k = 0..n/2.
// inverse(): real[l] = spectrum[0] + spectrum[n/2] (-1)^l
//                      + 2 Re sum_{k=1}^{n/2-1} spectrum[k] exp(2 pi j k l / n)
//            (imaginary parts of DC and Nyquist are ignored; spectrum is
//            clobbered).
// Plans are created once per length under a lock; separate instances may be
// used from separate threads.
class RealFft {
public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::span<double> real() noexcept { return {real_, n_}; }
  std::span<std::complex<double>> spectrum() noexcept { return {spec_, n_ / 2 + 1}; }

  void forward();
  void inverse();

private:
  std::size_t n_;
  void* r2c_;
  void* c2r_;
  double* real_;
  std::complex<double>* spec_;
};

} // namespace phasehpss::detail
