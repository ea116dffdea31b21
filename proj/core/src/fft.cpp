#include "fasbeam/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <unordered_map>

namespace fasbeam {

namespace {
// FFTW plan creation/destruction is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* cpx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

RealFft::RealFft(int n) : n_(n), impl_(new Impl) {
  require(n >= 1, "RealFft: size must be >= 1");
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->real = fftw_alloc_real(n);
  impl_->cpx = fftw_alloc_complex(n / 2 + 1);
  impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->cpx, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(n, impl_->cpx, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real);
  fftw_free(impl_->cpx);
}

void RealFft::forward(const double* in, std::complex<double>* out) {
  std::memcpy(impl_->real, in, sizeof(double) * n_);
  fftw_execute(impl_->fwd);
  std::memcpy(out, impl_->cpx, sizeof(fftw_complex) * bins());
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
  std::memcpy(impl_->cpx, in, sizeof(fftw_complex) * bins());
  fftw_execute(impl_->inv);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = impl_->real[i] * scale;
}

CVec RealFft::forward(const Vec& in) {
  require(in.size() == n_, "RealFft::forward: length mismatch");
  CVec out(bins());
  forward(in.data(), out.data());
  return out;
}

Vec RealFft::inverse(const CVec& in) {
  require(in.size() == bins(), "RealFft::inverse: length mismatch");
  Vec out(n_);
  inverse(in.data(), out.data());
  return out;
}

RealFft& real_fft(int n) {
  thread_local std::unordered_map<int, std::unique_ptr<RealFft>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<RealFft>(n)).first;
  return *it->second;
}

Vec valid_correlate_direct(const Vec& a, const Vec& b) {
  require(a.size() >= b.size() && b.size() >= 1, "valid_correlate: need len(a) >= len(b) >= 1");
  const Eigen::Index out_len = a.size() - b.size() + 1;
  Vec out(out_len);
  for (Eigen::Index j = 0; j < out_len; ++j) out[j] = a.segment(j, b.size()).dot(b);
  return out;
}

Vec valid_correlate_fft(const Vec& a, const Vec& b) {
  require(a.size() >= b.size() && b.size() >= 1, "valid_correlate: need len(a) >= len(b) >= 1");
  const int n = static_cast<int>(a.size());
  // Circular correlation of size len(a) never wraps for lags 0..la-lb,
  // so no extra zero padding is needed.
  RealFft& fft = real_fft(n);
  Vec b_pad = Vec::Zero(n);
  b_pad.head(b.size()) = b;
  CVec sa = fft.forward(a);
  CVec sb = fft.forward(b_pad);
  CVec prod = sa.array() * sb.array().conjugate();
  Vec circ = fft.inverse(prod);
  return circ.head(a.size() - b.size() + 1);
}

}  // namespace fasbeam
