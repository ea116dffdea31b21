#include "fasbeam/signal.hpp"

#include "fasbeam/fft.hpp"

namespace fasbeam {

void MultichannelSignal::validate() const {
  require(samples.rows() >= 1, "MultichannelSignal: need at least one channel");
  require(samples.cols() >= 1, "MultichannelSignal: signal shorter than 1 sample");
  require(samples.allFinite(), "MultichannelSignal: non-finite samples");
  require(sample_rate > 0, "MultichannelSignal: sample rate must be positive");
}

FrameGrid make_frame_grid(long total_len, int frame_len, int hop) {
  require(frame_len >= 2, "frame_signal: frame_len must be >= 2");
  require(hop >= 1 && hop <= frame_len, "frame_signal: hop must be in [1, frame_len]");
  require(total_len >= 1, "frame_signal: signal shorter than 1 sample");
  FrameGrid grid;
  grid.frame_len = frame_len;
  grid.hop = hop;
  grid.total_len = total_len;
  if (total_len <= frame_len) {
    grid.n_frames = 1;
  } else {
    grid.n_frames = static_cast<int>((total_len - frame_len + hop - 1) / hop) + 1;
  }
  return grid;
}

namespace {
// Copy x[start : start+len-1] into dst with zero padding outside [0, n).
void copy_padded(const Eigen::Ref<const Eigen::RowVectorXd>& x, long start, long len,
                 Eigen::Ref<Eigen::RowVectorXd> dst) {
  dst.setZero();
  const long n = x.size();
  const long lo = std::max(start, 0L);
  const long hi = std::min(start + len, n);
  if (hi > lo) dst.segment(lo - start, hi - lo) = x.segment(lo, hi - lo);
}
}  // namespace

FramedSignal frame_signal(const MultichannelSignal& x, int frame_len, int hop) {
  x.validate();
  FramedSignal out;
  out.grid = make_frame_grid(x.length(), frame_len, hop);
  const int T = out.grid.n_frames;
  const int L = frame_len;
  out.channels.resize(x.channels());
  for (Eigen::Index i = 0; i < x.channels(); ++i) {
    FramedChannel& ch = out.channels[i];
    ch.centers.resize(T, L);
    ch.contexts.resize(T, 3 * L);
    for (int t = 0; t < T; ++t) {
      const long start = static_cast<long>(t) * hop;
      copy_padded(x.samples.row(i), start, L, ch.centers.row(t));
      copy_padded(x.samples.row(i), start - L, 3L * L, ch.contexts.row(t));
    }
  }
  return out;
}

ContextFrame FramedSignal::frame(int channel, int t) const {
  require(channel >= 0 && channel < static_cast<int>(channels.size()),
          "FramedSignal::frame: channel out of range");
  require(t >= 0 && t < grid.n_frames, "FramedSignal::frame: frame index out of range");
  ContextFrame f;
  f.center = channels[channel].centers.row(t);
  f.context = channels[channel].contexts.row(t);
  f.frame_index = t;
  f.channel_index = channel;
  return f;
}

namespace {
void check_filter_shapes(const Vec& context, const Vec& filter) {
  require(context.size() % 3 == 0 && context.size() > 0,
          "valid_filter: context length must be 3L");
  const Eigen::Index L = context.size() / 3;
  require(filter.size() == 2 * L + 1, "valid_filter: filter length must be 2L+1");
}
}  // namespace

Vec valid_filter(const Vec& context, const Vec& filter) {
  check_filter_shapes(context, filter);
  return valid_correlate_fft(context, filter);
}

Vec valid_filter_direct(const Vec& context, const Vec& filter) {
  check_filter_shapes(context, filter);
  return valid_correlate_direct(context, filter);
}

Eigen::VectorXi overlap_counts(const FrameGrid& grid) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(grid.total_len);
  for (int t = 0; t < grid.n_frames; ++t) {
    const long start = static_cast<long>(t) * grid.hop;
    const long hi = std::min<long>(start + grid.frame_len, grid.total_len);
    for (long n = start; n < hi; ++n) counts[n] += 1;
  }
  return counts;
}

Vec overlap_add(const Mat& frames, const FrameGrid& grid) {
  require(frames.rows() == grid.n_frames, "overlap_add: frame count mismatch");
  require(frames.cols() == grid.frame_len, "overlap_add: frame length mismatch");
  Vec out = Vec::Zero(grid.total_len);
  for (int t = 0; t < grid.n_frames; ++t) {
    const long start = static_cast<long>(t) * grid.hop;
    const long hi = std::min<long>(start + grid.frame_len, grid.total_len);
    if (hi > start) out.segment(start, hi - start) += frames.row(t).head(hi - start);
  }
  const Eigen::VectorXi counts = overlap_counts(grid);
  for (long n = 0; n < grid.total_len; ++n) out[n] /= counts[n];
  return out;
}

}  // namespace fasbeam
