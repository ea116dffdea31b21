// Inter-channel NCC features: sliding cosine similarity between a context
// window and a fixed frame, plus permutation-invariant mean pooling.
#ifndef FASBEAM_FEATURES_HPP
#define FASBEAM_FEATURES_HPP

#include <vector>

#include "fasbeam/common.hpp"

namespace fasbeam {

// Norm floor shared by every NCC path. Windows with norm below the floor
// contribute similarity 0 (zero-padded boundary frames make zero windows
// routine); the floor also keeps training gradients finite.
inline constexpr double kNccNormFloor = 1e-8;

// Entry j (j = 0..2L) is the cosine similarity between context[j : j+L-1]
// and ref_frame; |entry| <= 1. context has length 3L, ref_frame length L.
Vec ncc_against_frame(const Vec& context, const Vec& ref_frame);
// O(L^2) reference path, must match ncc_against_frame.
Vec ncc_against_frame_direct(const Vec& context, const Vec& ref_frame);

// Stage-1 orientation: windows slide over the reference channel's context
// against another channel's center frame.
inline Vec ncc_stage1(const Vec& ref_context, const Vec& other_center) {
  return ncc_against_frame(ref_context, other_center);
}

// Row-wise batch: contexts is T x 3L, frames is T x L; returns T x (2L+1).
Mat ncc_rows(const Mat& contexts, const Mat& frames);

// Sliding window norms ||context[j : j+L-1]||_2 for j = 0..2L via a prefix
// sum of squares (the running-norm recursion).
Vec sliding_window_norms(const Vec& context, Eigen::Index window_len);

// Arithmetic mean of equal-length vectors, exactly invariant under input
// permutation (per-coordinate sorted summation).
Vec mean_pool_features(const std::vector<Vec>& features);

}  // namespace fasbeam

#endif  // FASBEAM_FEATURES_HPP
