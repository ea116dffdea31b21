// STFT analysis/synthesis with Hann windows and exact weighted overlap-add
// reconstruction. Shared by the training objectives and the frequency-domain
// beamformers.
#ifndef FASBEAM_STFT_HPP
#define FASBEAM_STFT_HPP

#include <vector>

#include "fasbeam/signal.hpp"

namespace fasbeam {

struct StftConfig {
  int window_len = 512;
  int hop = 128;
  int fft_size = 512;  // >= window_len, zero-padded analysis
  std::string window = "hann";

  int bins() const { return fft_size / 2 + 1; }
  void validate() const;

  // 32 ms window / 8 ms hop defaults scaled to the sample rate.
  static StftConfig for_rate(int sample_rate, double window_ms = 32.0, double hop_ms = 8.0);
};

Vec hann_window(int n);  // periodic

// Rows are frames, columns are the fft_size/2+1 nonnegative-frequency bins.
CMat stft(const Vec& x, const StftConfig& cfg);

// Matched Hann synthesis, per-sample window-square normalization, output
// truncated to `length`.
Vec istft(const CMat& spec, const StftConfig& cfg, long length);

std::vector<CMat> stft_multichannel(const MultichannelSignal& x, const StftConfig& cfg);

// Frame count the analysis produces for a signal of this length.
int stft_frames(long length, const StftConfig& cfg);

}  // namespace fasbeam

#endif  // FASBEAM_STFT_HPP
