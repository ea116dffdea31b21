// Deterministic signal plumbing: multichannel containers, framing with
// context windows, valid filtering and overlap-add reconstruction.
#ifndef FASBEAM_SIGNAL_HPP
#define FASBEAM_SIGNAL_HPP

#include <vector>

#include "fasbeam/common.hpp"

namespace fasbeam {

// Raw array observation. Rows are channels, columns are samples.
struct MultichannelSignal {
  Mat samples;
  int sample_rate = 16000;

  MultichannelSignal() = default;
  MultichannelSignal(Mat s, int rate) : samples(std::move(s)), sample_rate(rate) {}

  Eigen::Index channels() const { return samples.rows(); }
  Eigen::Index length() const { return samples.cols(); }
  void validate() const;
};

// Framing metadata. n_frames = ceil((total_len - frame_len)/hop) + 1 with the
// tail zero-padded; a signal shorter than one frame still yields one frame.
struct FrameGrid {
  int frame_len = 0;   // L
  int hop = 0;         // H, in [1, L]
  int n_frames = 0;    // T
  long total_len = 0;  // l
};

FrameGrid make_frame_grid(long total_len, int frame_len, int hop);

// One frame of one channel: center is x[tH : tH+L-1], context is
// x[tH-L : tH+2L-1], zero-padded outside the signal.
struct ContextFrame {
  Vec center;   // L
  Vec context;  // 3L
  int frame_index = 0;
  int channel_index = 0;
};

// All frames of one channel packed row-wise.
struct FramedChannel {
  Mat centers;   // T x L
  Mat contexts;  // T x 3L
};

struct FramedSignal {
  FrameGrid grid;
  std::vector<FramedChannel> channels;
  ContextFrame frame(int channel, int t) const;
};

FramedSignal frame_signal(const MultichannelSignal& x, int frame_len, int hop);

// Sliding inner product (cross-correlation convention, no kernel flip):
// out[n] = sum_k filter[k] * context[n+k], n = 0..L-1, with len(context)=3L
// and len(filter)=2L+1. A unit impulse at tap L is the identity.
Vec valid_filter(const Vec& context, const Vec& filter);
Vec valid_filter_direct(const Vec& context, const Vec& filter);

// Rectangular-window overlap-add: frames placed at t*hop, summed, divided by
// the per-sample overlap count and truncated to grid.total_len.
Vec overlap_add(const Mat& frames, const FrameGrid& grid);

// Number of frames covering each output sample (always >= 1).
Eigen::VectorXi overlap_counts(const FrameGrid& grid);

}  // namespace fasbeam

#endif  // FASBEAM_SIGNAL_HPP
