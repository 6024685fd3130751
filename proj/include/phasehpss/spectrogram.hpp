#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace phasehpss {

using cplx = std::complex<double>;

// Dense K x T matrix indexed (bin, frame). Storage is frame-major so a
// single frame is contiguous, which is what the per-frame FFTs want.
template <typename T>
class Grid {
public:
  Grid() = default;
  Grid(std::size_t bins, std::size_t frames, T fill = T{})
      : bins_(bins), frames_(frames), data_(bins * frames, fill) {}

  std::size_t bins() const noexcept { return bins_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t bin, std::size_t frame) {
    assert(bin < bins_ && frame < frames_);
    return data_[frame * bins_ + bin];
  }
  const T& operator()(std::size_t bin, std::size_t frame) const {
    assert(bin < bins_ && frame < frames_);
    return data_[frame * bins_ + bin];
  }

  std::span<T> frame(std::size_t t) { return {data_.data() + t * bins_, bins_}; }
  std::span<const T> frame(std::size_t t) const {
    return {data_.data() + t * bins_, bins_};
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return bins_ == other.bins() && frames_ == other.frames();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  std::size_t bins_ = 0;
  std::size_t frames_ = 0;
  std::vector<T> data_;
};

using RealGrid = Grid<double>;

// One-sided complex spectrogram. `signal_length` records the length of the
// time signal it was computed from (0 for free-standing matrices) so the
// adjoint can reproduce it.
struct Spectrogram : Grid<cplx> {
  Spectrogram() = default;
  Spectrogram(std::size_t bins, std::size_t frames, std::size_t signal_len = 0)
      : Grid<cplx>(bins, frames), signal_length(signal_len) {}

  std::size_t signal_length = 0;
};

// Multiplicity of a one-sided bin in the full spectrum: DC and Nyquist appear
// once, interior bins twice. K bins correspond to an even transform length
// 2(K-1).
inline double bin_weight(std::size_t bin, std::size_t n_bins) noexcept {
  return (bin == 0 || bin + 1 == n_bins) ? 1.0 : 2.0;
}

// Real inner product Re<X, Y> with one-sided bin weighting. This is the
// inner product under which the STFT adjoint is exact.
double inner(const Spectrogram& x, const Spectrogram& y);
// Weighted squared Frobenius norm, equal to the two-sided energy.
double norm_sq(const Spectrogram& x);
// Weighted 2-norm of frame t.
double frame_norm(const Spectrogram& x, std::size_t t);

// Elementwise helpers used by the operators.
void scale(Spectrogram& x, double factor);
// y <- y + a * x
void axpy(double a, const Spectrogram& x, Spectrogram& y);
RealGrid magnitude(const Spectrogram& x);

} // namespace phasehpss
