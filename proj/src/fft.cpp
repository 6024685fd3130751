#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "phasehpss/error.hpp"

namespace phasehpss::detail {
namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution of an existing plan on new
// (equally aligned) arrays is.
PlanPair plans_for(std::size_t n) {
  static std::mutex m;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(m);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  const int len = static_cast<int>(n);
  double* rbuf = fftw_alloc_real(n);
  fftw_complex* cbuf = fftw_alloc_complex(n / 2 + 1);
  PlanPair p;
  // FFTW_ESTIMATE keeps the chosen algorithm, and so the rounding, identical
  // from run to run.
  p.r2c = fftw_plan_dft_r2c_1d(len, rbuf, cbuf, FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_1d(len, cbuf, rbuf, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  fftw_free(rbuf);
  fftw_free(cbuf);
  if (!p.r2c || !p.c2r) throw Error("FFTW planning failed");
  cache.emplace(n, p);
  return p;
}

} // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("FFT length must be even and >= 2");
  auto p = plans_for(n);
  r2c_ = p.r2c;
  c2r_ = p.c2r;
  real_ = fftw_alloc_real(n);
  spec_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n / 2 + 1));
}

RealFft::~RealFft() {
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward() {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), real_,
                       reinterpret_cast<fftw_complex*>(spec_));
}

void RealFft::inverse() {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_),
                       reinterpret_cast<fftw_complex*>(spec_), real_);
}

} // namespace phasehpss::detail
