// Minimal reverse-mode autodiff tape over 2-D double arrays. Nodes are
// created in topological order; backward() replays the tape in reverse.
// Only the ops the FaSNet graph needs are provided.
#ifndef FASBEAM_AUTODIFF_HPP
#define FASBEAM_AUTODIFF_HPP

#include <deque>
#include <functional>

#include "fasbeam/signal.hpp"

namespace fasbeam::ad {

using fasbeam::Arr;

class Tape;

class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  const Arr& value() const;
  const Arr& grad() const;  // zero-sized until backward touches it
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const;
  int id() const { return id_; }
  Tape* tape() const { return tape_; }
  explicit operator bool() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  struct Node {
    Arr value;
    Arr grad;
    bool requires_grad = false;
    std::function<void(Tape&, int)> pull;  // push this node's grad to parents
  };

  Var constant(Arr v) { return Var(this, add(std::move(v), false, nullptr)); }
  Var leaf(Arr v) { return Var(this, add(std::move(v), true, nullptr)); }

  int add(Arr value, bool requires_grad, std::function<void(Tape&, int)> pull);
  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  void accumulate(int id, const Arr& g);
  std::size_t size() const { return nodes_.size(); }

  // Seeds root (which must be 1x1) with gradient one and runs the tape
  // backward. May be called once per tape.
  void backward(const Var& root);

 private:
  std::deque<Node> nodes_;
};

// -- elementwise / broadcast ---------------------------------------------
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var add_scalar(Var a, double s);
Var mul_scalar(Var a, double s);
inline Var neg(Var a) { return mul_scalar(a, -1.0); }
Var bcast_add(Var a, Var s);  // s is 1x1
Var bcast_mul(Var a, Var s);  // s is 1x1
Var add_rowvec(Var a, Var r);
Var mul_rowvec(Var a, Var r);
Var add_colvec(Var a, Var c);
Var mul_colvec(Var a, Var c);

Var tanh_(Var a);
Var sigmoid_(Var a);
Var sqrt_(Var a);
Var log_(Var a);
Var square_(Var a);
Var prelu(Var a, Var alpha);    // alpha is 1x1
Var min_scalar(Var a, double c);
Var max_scalar(Var a, double c);

// -- reductions / reshaping ----------------------------------------------
Var sum_all(Var a);   // 1x1
Var row_sum(Var a);   // m x 1, sums each row
Var col_sum(Var a);   // 1 x n, sums each column
Var cumsum_rows(Var a);
Var concat_cols(Var a, Var b);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index n);

// -- linear algebra ---------------------------------------------------------
Var matmul(Var a, Var b);

// -- domain ops --------------------------------------------------------------

// Depthwise dilated conv over time (rows). x is T x H, taps is K x H
// (tap index k, channel h). Non-causal centers the kernel (K odd); causal
// uses taps at offsets {-(K-1)d, ..., -d, 0}. Out-of-range samples are zero.
Var dconv_time(Var x, Var taps, int dilation, bool causal);

// Per-row valid filtering: out[t,n] = sum_k filters[t,k] * contexts(t,n+k).
// contexts is a constant T x 3L array, filters T x (2L+1), result T x L.
Var valid_filter_rows(const Arr& contexts, Var filters);

// Per-row NCC against a variable frame: contexts constant T x 3L, frames
// T x L, result T x (2L+1). Same norm-floor convention as features::ncc.
Var ncc_rows_vs_frames(const Arr& contexts, Var frames);

// Overlap-add of variable frames (T x L) onto a 1 x total_len row.
Var overlap_add_rows(Var frames, const FrameGrid& grid);

// -- composition helpers -------------------------------------------------
inline Var dot(Var a, Var b) { return sum_all(mul(a, b)); }
Var mean_all(Var a);

}  // namespace fasbeam::ad

#endif  // FASBEAM_AUTODIFF_HPP
