#include "fasbeam/stft.hpp"

#include "fasbeam/fft.hpp"

namespace fasbeam {

void StftConfig::validate() const {
  require(window_len >= 2, "StftConfig: window_len must be >= 2");
  require(hop >= 1 && hop < window_len, "StftConfig: hop must be in [1, window_len)");
  require(fft_size >= window_len, "StftConfig: fft_size must be >= window_len");
  require(window == "hann", "StftConfig: only the hann window is supported");
}

StftConfig StftConfig::for_rate(int sample_rate, double window_ms, double hop_ms) {
  StftConfig cfg;
  cfg.window_len = std::max(2, static_cast<int>(std::lround(window_ms * sample_rate / 1000.0)));
  cfg.hop = std::max(1, static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0)));
  int n = 2;
  while (n < cfg.window_len) n *= 2;
  cfg.fft_size = n;
  return cfg;
}

Vec hann_window(int n) {
  Vec w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
  return w;
}

// The periodic hann window is zero at its first sample, so analysis is run
// on the signal left-padded with one hop of zeros; every real sample then
// carries nonzero synthesis weight and the round trip is exact. Frame t
// covers original samples [t*hop - hop, t*hop - hop + window_len).

int stft_frames(long length, const StftConfig& cfg) {
  return make_frame_grid(length + cfg.hop, cfg.window_len, cfg.hop).n_frames;
}

CMat stft(const Vec& x, const StftConfig& cfg) {
  cfg.validate();
  require(x.size() >= 1, "stft: empty signal");
  const long padded_len = x.size() + cfg.hop;
  const FrameGrid grid = make_frame_grid(padded_len, cfg.window_len, cfg.hop);
  const Vec window = hann_window(cfg.window_len);
  RealFft& fft = real_fft(cfg.fft_size);
  CMat spec(grid.n_frames, cfg.bins());
  Vec buf = Vec::Zero(cfg.fft_size);
  CVec out(cfg.bins());
  for (int t = 0; t < grid.n_frames; ++t) {
    buf.setZero();
    const long start = static_cast<long>(t) * cfg.hop - cfg.hop;
    const long lo = std::max(start, 0L);
    const long hi = std::min<long>(start + cfg.window_len, x.size());
    for (long n = lo; n < hi; ++n) buf[n - start] = x[n] * window[n - start];
    fft.forward(buf.data(), out.data());
    spec.row(t) = out.transpose();
  }
  return spec;
}

Vec istft(const CMat& spec, const StftConfig& cfg, long length) {
  cfg.validate();
  require(spec.cols() == cfg.bins(), "istft: bin count mismatch");
  require(length >= 1, "istft: bad output length");
  const Vec window = hann_window(cfg.window_len);
  RealFft& fft = real_fft(cfg.fft_size);
  Vec out = Vec::Zero(length);
  Vec weight = Vec::Zero(length);
  Vec frame(cfg.fft_size);
  CVec in(cfg.bins());
  for (Eigen::Index t = 0; t < spec.rows(); ++t) {
    in = spec.row(t).transpose();
    fft.inverse(in.data(), frame.data());
    const long start = t * cfg.hop - cfg.hop;
    const long lo = std::max(start, 0L);
    const long hi = std::min<long>(start + cfg.window_len, length);
    for (long n = lo; n < hi; ++n) {
      out[n] += frame[n - start] * window[n - start];
      weight[n] += window[n - start] * window[n - start];
    }
  }
  for (long n = 0; n < length; ++n)
    if (weight[n] > 1e-12) out[n] /= weight[n];
  return out;
}

std::vector<CMat> stft_multichannel(const MultichannelSignal& x, const StftConfig& cfg) {
  x.validate();
  std::vector<CMat> specs;
  specs.reserve(x.channels());
  for (Eigen::Index c = 0; c < x.channels(); ++c) specs.push_back(stft(x.samples.row(c), cfg));
  return specs;
}

}  // namespace fasbeam
