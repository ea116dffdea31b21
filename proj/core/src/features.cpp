#include "fasbeam/features.hpp"

#include <algorithm>

#include "fasbeam/fft.hpp"

namespace fasbeam {

namespace {
void check_ncc_shapes(const Vec& context, const Vec& ref_frame) {
  require(context.size() % 3 == 0 && context.size() > 0,
          "ncc_against_frame: context length must be 3L");
  require(ref_frame.size() == context.size() / 3,
          "ncc_against_frame: ref_frame length must be L");
}
}  // namespace

Vec sliding_window_norms(const Vec& context, Eigen::Index window_len) {
  require(window_len >= 1 && window_len <= context.size(),
          "sliding_window_norms: bad window length");
  const Eigen::Index n_out = context.size() - window_len + 1;
  Vec prefix(context.size() + 1);
  prefix[0] = 0.0;
  for (Eigen::Index i = 0; i < context.size(); ++i)
    prefix[i + 1] = prefix[i] + context[i] * context[i];
  Vec norms(n_out);
  for (Eigen::Index j = 0; j < n_out; ++j)
    norms[j] = std::sqrt(std::max(prefix[j + window_len] - prefix[j], 0.0));
  return norms;
}

Vec ncc_against_frame(const Vec& context, const Vec& ref_frame) {
  check_ncc_shapes(context, ref_frame);
  const Eigen::Index L = ref_frame.size();
  Vec dots = valid_correlate_fft(context, ref_frame);
  Vec norms = sliding_window_norms(context, L);
  const double ref_norm = std::max(ref_frame.norm(), kNccNormFloor);
  Vec out(2 * L + 1);
  for (Eigen::Index j = 0; j < out.size(); ++j)
    out[j] = dots[j] / (std::max(norms[j], kNccNormFloor) * ref_norm);
  return out;
}

Vec ncc_against_frame_direct(const Vec& context, const Vec& ref_frame) {
  check_ncc_shapes(context, ref_frame);
  const Eigen::Index L = ref_frame.size();
  const double ref_norm = std::max(ref_frame.norm(), kNccNormFloor);
  Vec out(2 * L + 1);
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const auto window = context.segment(j, L);
    out[j] = window.dot(ref_frame) / (std::max(window.norm(), kNccNormFloor) * ref_norm);
  }
  return out;
}

Mat ncc_rows(const Mat& contexts, const Mat& frames) {
  require(contexts.rows() == frames.rows(), "ncc_rows: frame count mismatch");
  require(contexts.cols() == 3 * frames.cols(), "ncc_rows: context width must be 3L");
  const Eigen::Index L = frames.cols();
  Mat out(contexts.rows(), 2 * L + 1);
  for (Eigen::Index t = 0; t < contexts.rows(); ++t)
    out.row(t) = ncc_against_frame(contexts.row(t), frames.row(t)).transpose();
  return out;
}

Vec mean_pool_features(const std::vector<Vec>& features) {
  require(!features.empty(), "mean_pool_features: empty feature list");
  const Eigen::Index dim = features.front().size();
  for (const Vec& f : features)
    require(f.size() == dim, "mean_pool_features: feature length mismatch");
  Vec out(dim);
  std::vector<double> vals(features.size());
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < features.size(); ++i) vals[i] = features[i][j];
    std::sort(vals.begin(), vals.end());
    double sum = 0.0;
    for (double v : vals) sum += v;
    out[j] = sum / static_cast<double>(features.size());
  }
  return out;
}

}  // namespace fasbeam
