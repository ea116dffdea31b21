// Real-input FFT on top of FFTW3, plus the FFT fast path for valid
// (sliding inner product) correlation used by the framing and NCC code.
#ifndef FASBEAM_FFT_HPP
#define FASBEAM_FFT_HPP

#include <complex>
#include <memory>

#include "fasbeam/common.hpp"

namespace fasbeam {

class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int bins() const { return n_ / 2 + 1; }

  // out must hold bins() values.
  void forward(const double* in, std::complex<double>* out);
  // Inverse transform including the 1/n scale; out must hold size() values.
  void inverse(const std::complex<double>* in, double* out);

  CVec forward(const Vec& in);
  Vec inverse(const CVec& in);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

// Per-thread cached engine for the given size.
RealFft& real_fft(int n);

// out[j] = sum_k a[j+k] * b[k] for j = 0 .. len(a)-len(b); requires
// len(a) >= len(b) >= 1. The _fft variant is the fast path, the _direct
// variant the O(n^2) reference.
Vec valid_correlate_fft(const Vec& a, const Vec& b);
Vec valid_correlate_direct(const Vec& a, const Vec& b);

}  // namespace fasbeam

#endif  // FASBEAM_FFT_HPP
