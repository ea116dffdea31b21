#include "fasbeam/autodiff.hpp"

#include "fasbeam/features.hpp"

namespace fasbeam::ad {

const Arr& Var::value() const { return tape_->node(id_).value; }
const Arr& Var::grad() const { return tape_->node(id_).grad; }
bool Var::requires_grad() const { return tape_->node(id_).requires_grad; }

int Tape::add(Arr value, bool requires_grad, std::function<void(Tape&, int)> pull) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.pull = std::move(pull);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Tape::accumulate(int id, const Arr& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) n.grad = Arr::Zero(n.value.rows(), n.value.cols());
  n.grad += g;
}

void Tape::backward(const Var& root) {
  require(root.tape() == this, "Tape::backward: var from another tape");
  require(root.value().size() == 1, "Tape::backward: root must be scalar");
  accumulate(root.id(), Arr::Ones(1, 1));
  for (int id = root.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad || n.grad.size() == 0 || !n.pull) continue;
    n.pull(*this, id);
  }
}

namespace {

Tape& same_tape(Var a, Var b) {
  require(a.tape() && a.tape() == b.tape(), "ad: vars must share one tape");
  return *a.tape();
}

bool any_grad(Var a) { return a.requires_grad(); }
bool any_grad(Var a, Var b) { return a.requires_grad() || b.requires_grad(); }

// Generic binary elementwise builder. dfa/dfb compute local grads from
// (gout, a_val, b_val, out_val).
template <typename F, typename Da, typename Db>
Var binary_op(Var a, Var b, F&& fwd, Da&& da, Db&& db, const char* name) {
  Tape& tape = same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), std::string(name) + ": shape mismatch");
  Arr out = fwd(a.value(), b.value());
  const int ia = a.id(), ib = b.id();
  std::function<void(Tape&, int)> pull;
  if (any_grad(a, b)) {
    pull = [ia, ib, da, db](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      const Arr& av = t.node(ia).value;
      const Arr& bv = t.node(ib).value;
      const Arr& ov = t.node(self).value;
      if (t.node(ia).requires_grad) t.accumulate(ia, da(g, av, bv, ov));
      if (t.node(ib).requires_grad) t.accumulate(ib, db(g, av, bv, ov));
    };
  }
  return Var(&tape, tape.add(std::move(out), any_grad(a, b), std::move(pull)));
}

template <typename F, typename D>
Var unary_op(Var a, F&& fwd, D&& da) {
  Tape& tape = *a.tape();
  Arr out = fwd(a.value());
  const int ia = a.id();
  std::function<void(Tape&, int)> pull;
  if (a.requires_grad()) {
    pull = [ia, da](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      t.accumulate(ia, da(g, t.node(ia).value, t.node(self).value));
    };
  }
  return Var(&tape, tape.add(std::move(out), a.requires_grad(), std::move(pull)));
}

}  // namespace

Var add(Var a, Var b) {
  return binary_op(
      a, b, [](const Arr& x, const Arr& y) { return Arr(x + y); },
      [](const Arr& g, const Arr&, const Arr&, const Arr&) { return g; },
      [](const Arr& g, const Arr&, const Arr&, const Arr&) { return g; }, "add");
}

Var sub(Var a, Var b) {
  return binary_op(
      a, b, [](const Arr& x, const Arr& y) { return Arr(x - y); },
      [](const Arr& g, const Arr&, const Arr&, const Arr&) { return g; },
      [](const Arr& g, const Arr&, const Arr&, const Arr&) { return Arr(-g); }, "sub");
}

Var mul(Var a, Var b) {
  return binary_op(
      a, b, [](const Arr& x, const Arr& y) { return Arr(x * y); },
      [](const Arr& g, const Arr&, const Arr& bv, const Arr&) { return Arr(g * bv); },
      [](const Arr& g, const Arr& av, const Arr&, const Arr&) { return Arr(g * av); }, "mul");
}

Var div(Var a, Var b) {
  return binary_op(
      a, b, [](const Arr& x, const Arr& y) { return Arr(x / y); },
      [](const Arr& g, const Arr&, const Arr& bv, const Arr&) { return Arr(g / bv); },
      [](const Arr& g, const Arr&, const Arr& bv, const Arr& ov) { return Arr(-g * ov / bv); },
      "div");
}

Var add_scalar(Var a, double s) {
  return unary_op(
      a, [s](const Arr& x) { return Arr(x + s); },
      [](const Arr& g, const Arr&, const Arr&) { return g; });
}

Var mul_scalar(Var a, double s) {
  return unary_op(
      a, [s](const Arr& x) { return Arr(x * s); },
      [s](const Arr& g, const Arr&, const Arr&) { return Arr(g * s); });
}

Var bcast_add(Var a, Var s) {
  Tape& tape = same_tape(a, s);
  require(s.value().size() == 1, "bcast_add: s must be 1x1");
  Arr out = a.value() + s.value()(0, 0);
  const int ia = a.id(), is = s.id();
  std::function<void(Tape&, int)> pull;
  if (any_grad(a, s)) {
    pull = [ia, is](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      if (t.node(ia).requires_grad) t.accumulate(ia, g);
      if (t.node(is).requires_grad) {
        Arr gs(1, 1);
        gs(0, 0) = g.sum();
        t.accumulate(is, gs);
      }
    };
  }
  return Var(&tape, tape.add(std::move(out), any_grad(a, s), std::move(pull)));
}

Var bcast_mul(Var a, Var s) {
  Tape& tape = same_tape(a, s);
  require(s.value().size() == 1, "bcast_mul: s must be 1x1");
  Arr out = a.value() * s.value()(0, 0);
  const int ia = a.id(), is = s.id();
  std::function<void(Tape&, int)> pull;
  if (any_grad(a, s)) {
    pull = [ia, is](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      const double sv = t.node(is).value(0, 0);
      if (t.node(ia).requires_grad) t.accumulate(ia, Arr(g * sv));
      if (t.node(is).requires_grad) {
        Arr gs(1, 1);
        gs(0, 0) = (g * t.node(ia).value).sum();
        t.accumulate(is, gs);
      }
    };
  }
  return Var(&tape, tape.add(std::move(out), any_grad(a, s), std::move(pull)));
}

namespace {
// rowvec/colvec broadcast helper, axis 0 = broadcast a 1 x n row over rows,
// axis 1 = broadcast an m x 1 col over columns.
template <bool kIsAdd>
Var bcast_vec_op(Var a, Var v, int axis, const char* name) {
  Tape& tape = same_tape(a, v);
  if (axis == 0)
    require(v.rows() == 1 && v.cols() == a.cols(), std::string(name) + ": need 1 x n row vector");
  else
    require(v.cols() == 1 && v.rows() == a.rows(), std::string(name) + ": need m x 1 col vector");
  Arr out = a.value();
  if (axis == 0) {
    if constexpr (kIsAdd) out.rowwise() += v.value().row(0);
    else out.rowwise() *= v.value().row(0);
  } else {
    if constexpr (kIsAdd) out.colwise() += v.value().col(0);
    else out.colwise() *= v.value().col(0);
  }
  const int ia = a.id(), iv = v.id();
  std::function<void(Tape&, int)> pull;
  if (any_grad(a, v)) {
    pull = [ia, iv, axis](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      const Arr& av = t.node(ia).value;
      const Arr& vv = t.node(iv).value;
      if (t.node(ia).requires_grad) {
        if constexpr (kIsAdd) {
          t.accumulate(ia, g);
        } else {
          Arr ga = g;
          if (axis == 0) ga.rowwise() *= vv.row(0);
          else ga.colwise() *= vv.col(0);
          t.accumulate(ia, ga);
        }
      }
      if (t.node(iv).requires_grad) {
        Arr gl = kIsAdd ? g : Arr(g * av);
        if (axis == 0) t.accumulate(iv, Arr(gl.colwise().sum()));
        else t.accumulate(iv, Arr(gl.rowwise().sum()));
      }
    };
  }
  return Var(&tape, tape.add(std::move(out), any_grad(a, v), std::move(pull)));
}
}  // namespace

Var add_rowvec(Var a, Var r) { return bcast_vec_op<true>(a, r, 0, "add_rowvec"); }
Var mul_rowvec(Var a, Var r) { return bcast_vec_op<false>(a, r, 0, "mul_rowvec"); }
Var add_colvec(Var a, Var c) { return bcast_vec_op<true>(a, c, 1, "add_colvec"); }
Var mul_colvec(Var a, Var c) { return bcast_vec_op<false>(a, c, 1, "mul_colvec"); }

Var tanh_(Var a) {
  return unary_op(
      a, [](const Arr& x) { return Arr(x.tanh()); },
      [](const Arr& g, const Arr&, const Arr& y) { return Arr(g * (1.0 - y * y)); });
}

Var sigmoid_(Var a) {
  return unary_op(
      a, [](const Arr& x) { return Arr(1.0 / (1.0 + (-x).exp())); },
      [](const Arr& g, const Arr&, const Arr& y) { return Arr(g * y * (1.0 - y)); });
}

Var sqrt_(Var a) {
  return unary_op(
      a, [](const Arr& x) { return Arr(x.sqrt()); },
      [](const Arr& g, const Arr&, const Arr& y) { return Arr(g * 0.5 / y); });
}

Var log_(Var a) {
  return unary_op(
      a, [](const Arr& x) { return Arr(x.log()); },
      [](const Arr& g, const Arr& x, const Arr&) { return Arr(g / x); });
}

Var square_(Var a) {
  return unary_op(
      a, [](const Arr& x) { return Arr(x * x); },
      [](const Arr& g, const Arr& x, const Arr&) { return Arr(2.0 * g * x); });
}

Var prelu(Var a, Var alpha) {
  Tape& tape = same_tape(a, alpha);
  require(alpha.value().size() == 1, "prelu: alpha must be 1x1");
  const double al = alpha.value()(0, 0);
  Arr out = (a.value() > 0.0).select(a.value(), al * a.value());
  const int ia = a.id(), ial = alpha.id();
  std::function<void(Tape&, int)> pull;
  if (any_grad(a, alpha)) {
    pull = [ia, ial](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      const Arr& x = t.node(ia).value;
      const double av = t.node(ial).value(0, 0);
      if (t.node(ia).requires_grad)
        t.accumulate(ia, Arr((x > 0.0).select(g, av * g)));
      if (t.node(ial).requires_grad) {
        Arr ga(1, 1);
        ga(0, 0) = ((x > 0.0).select(Arr::Zero(x.rows(), x.cols()), g * x)).sum();
        t.accumulate(ial, ga);
      }
    };
  }
  return Var(&tape, tape.add(std::move(out), any_grad(a, alpha), std::move(pull)));
}

Var min_scalar(Var a, double c) {
  return unary_op(
      a, [c](const Arr& x) { return Arr(x.min(c)); },
      [c](const Arr& g, const Arr& x, const Arr&) {
        return Arr((x < c).select(g, Arr::Zero(g.rows(), g.cols())));
      });
}

Var max_scalar(Var a, double c) {
  return unary_op(
      a, [c](const Arr& x) { return Arr(x.max(c)); },
      [c](const Arr& g, const Arr& x, const Arr&) {
        return Arr((x > c).select(g, Arr::Zero(g.rows(), g.cols())));
      });
}

Var sum_all(Var a) {
  return unary_op(
      a,
      [](const Arr& x) {
        Arr s(1, 1);
        s(0, 0) = x.sum();
        return s;
      },
      [](const Arr& g, const Arr& x, const Arr&) {
        return Arr::Constant(x.rows(), x.cols(), g(0, 0));
      });
}

Var row_sum(Var a) {
  return unary_op(
      a, [](const Arr& x) { return Arr(x.rowwise().sum()); },
      [](const Arr& g, const Arr& x, const Arr&) {
        return Arr(g.col(0).replicate(1, x.cols()));
      });
}

Var col_sum(Var a) {
  return unary_op(
      a, [](const Arr& x) { return Arr(x.colwise().sum()); },
      [](const Arr& g, const Arr& x, const Arr&) {
        return Arr(g.row(0).replicate(x.rows(), 1));
      });
}

Var cumsum_rows(Var a) {
  return unary_op(
      a,
      [](const Arr& x) {
        Arr y = x;
        for (Eigen::Index t = 1; t < y.rows(); ++t) y.row(t) += y.row(t - 1);
        return y;
      },
      [](const Arr& g, const Arr&, const Arr&) {
        Arr d = g;
        for (Eigen::Index t = d.rows() - 2; t >= 0; --t) d.row(t) += d.row(t + 1);
        return d;
      });
}

Var concat_cols(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  require(a.rows() == b.rows(), "concat_cols: row mismatch");
  Arr out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a.value();
  out.rightCols(b.cols()) = b.value();
  const int ia = a.id(), ib = b.id();
  const Eigen::Index ca = a.cols();
  std::function<void(Tape&, int)> pull;
  if (any_grad(a, b)) {
    pull = [ia, ib, ca](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      if (t.node(ia).requires_grad) t.accumulate(ia, Arr(g.leftCols(ca)));
      if (t.node(ib).requires_grad) t.accumulate(ib, Arr(g.rightCols(g.cols() - ca)));
    };
  }
  return Var(&tape, tape.add(std::move(out), any_grad(a, b), std::move(pull)));
}

Var slice_cols(Var a, Eigen::Index start, Eigen::Index n) {
  Tape& tape = *a.tape();
  require(start >= 0 && n >= 1 && start + n <= a.cols(), "slice_cols: range out of bounds");
  Arr out = a.value().middleCols(start, n);
  const int ia = a.id();
  std::function<void(Tape&, int)> pull;
  if (a.requires_grad()) {
    pull = [ia, start, n](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      const Arr& x = t.node(ia).value;
      Arr gx = Arr::Zero(x.rows(), x.cols());
      gx.middleCols(start, n) = g;
      t.accumulate(ia, gx);
    };
  }
  return Var(&tape, tape.add(std::move(out), a.requires_grad(), std::move(pull)));
}

Var matmul(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  require(a.cols() == b.rows(), "matmul: inner dimension mismatch");
  Arr out = (a.value().matrix() * b.value().matrix()).array();
  const int ia = a.id(), ib = b.id();
  std::function<void(Tape&, int)> pull;
  if (any_grad(a, b)) {
    pull = [ia, ib](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      if (t.node(ia).requires_grad)
        t.accumulate(ia, Arr((g.matrix() * t.node(ib).value.matrix().transpose()).array()));
      if (t.node(ib).requires_grad)
        t.accumulate(ib, Arr((t.node(ia).value.matrix().transpose() * g.matrix()).array()));
    };
  }
  return Var(&tape, tape.add(std::move(out), any_grad(a, b), std::move(pull)));
}

namespace {
// Tap offsets in frames: centered for non-causal (K odd), past-only for causal.
std::vector<int> dconv_offsets(int K, int dilation, bool causal) {
  std::vector<int> off(K);
  for (int k = 0; k < K; ++k) off[k] = causal ? (k - (K - 1)) * dilation : (k - (K - 1) / 2) * dilation;
  return off;
}
}  // namespace

Var dconv_time(Var x, Var taps, int dilation, bool causal) {
  Tape& tape = same_tape(x, taps);
  require(taps.cols() == x.cols(), "dconv_time: channel count mismatch");
  const int K = static_cast<int>(taps.rows());
  require(K >= 1 && (causal || K % 2 == 1), "dconv_time: non-causal kernel must be odd");
  require(dilation >= 1, "dconv_time: dilation must be >= 1");
  const Eigen::Index T = x.rows(), H = x.cols();
  const std::vector<int> off = dconv_offsets(K, dilation, causal);

  Arr out = Arr::Zero(T, H);
  for (int k = 0; k < K; ++k) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, -off[k]);
    const Eigen::Index hi = std::min<Eigen::Index>(T, T - off[k]);
    if (hi <= lo) continue;
    out.middleRows(lo, hi - lo) +=
        x.value().middleRows(lo + off[k], hi - lo).rowwise() * taps.value().row(k);
  }

  const int ix = x.id(), iw = taps.id();
  std::function<void(Tape&, int)> pull;
  if (any_grad(x, taps)) {
    pull = [ix, iw, off, K, T, H](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      const Arr& xv = t.node(ix).value;
      const Arr& wv = t.node(iw).value;
      if (t.node(ix).requires_grad) {
        Arr gx = Arr::Zero(T, H);
        for (int k = 0; k < K; ++k) {
          const Eigen::Index lo = std::max<Eigen::Index>(0, -off[k]);
          const Eigen::Index hi = std::min<Eigen::Index>(T, T - off[k]);
          if (hi <= lo) continue;
          gx.middleRows(lo + off[k], hi - lo) += g.middleRows(lo, hi - lo).rowwise() * wv.row(k);
        }
        t.accumulate(ix, gx);
      }
      if (t.node(iw).requires_grad) {
        Arr gw = Arr::Zero(K, H);
        for (int k = 0; k < K; ++k) {
          const Eigen::Index lo = std::max<Eigen::Index>(0, -off[k]);
          const Eigen::Index hi = std::min<Eigen::Index>(T, T - off[k]);
          if (hi <= lo) continue;
          gw.row(k) = (g.middleRows(lo, hi - lo) * xv.middleRows(lo + off[k], hi - lo))
                          .colwise()
                          .sum();
        }
        t.accumulate(iw, gw);
      }
    };
  }
  return Var(&tape, tape.add(std::move(out), any_grad(x, taps), std::move(pull)));
}

Var valid_filter_rows(const Arr& contexts, Var filters) {
  Tape& tape = *filters.tape();
  require(contexts.cols() % 3 == 0, "valid_filter_rows: context width must be 3L");
  const Eigen::Index L = contexts.cols() / 3;
  require(filters.rows() == contexts.rows() && filters.cols() == 2 * L + 1,
          "valid_filter_rows: filters must be T x (2L+1)");
  const Eigen::Index T = contexts.rows();

  Arr out(T, L);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec ctx = contexts.row(t).matrix().transpose();
    const Vec flt = filters.value().row(t).matrix().transpose();
    out.row(t) = valid_correlate_fft(ctx, flt).transpose().array();
  }

  const int iflt = filters.id();
  std::function<void(Tape&, int)> pull;
  if (filters.requires_grad()) {
    const Arr ctx_copy = contexts;
    pull = [iflt, ctx_copy, T, L](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      Arr gf = Arr::Zero(T, 2 * L + 1);
      for (Eigen::Index tt = 0; tt < T; ++tt)
        for (Eigen::Index k = 0; k < 2 * L + 1; ++k)
          gf(tt, k) = (g.row(tt) * ctx_copy.row(tt).segment(k, L)).sum();
      t.accumulate(iflt, gf);
    };
  }
  return Var(&tape, tape.add(std::move(out), filters.requires_grad(), std::move(pull)));
}

Var ncc_rows_vs_frames(const Arr& contexts, Var frames) {
  Tape& tape = *frames.tape();
  require(contexts.cols() % 3 == 0, "ncc_rows_vs_frames: context width must be 3L");
  const Eigen::Index L = contexts.cols() / 3;
  require(frames.rows() == contexts.rows() && frames.cols() == L,
          "ncc_rows_vs_frames: frames must be T x L");
  const Eigen::Index T = contexts.rows();

  // Per-row window norms of the constant contexts, reused in backward.
  Arr win_norms(T, 2 * L + 1);
  Arr out(T, 2 * L + 1);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec ctx = contexts.row(t).matrix().transpose();
    win_norms.row(t) =
        sliding_window_norms(ctx, L).array().max(kNccNormFloor).transpose();
    const Vec frm = frames.value().row(t).matrix().transpose();
    const double fn = std::max(frm.norm(), kNccNormFloor);
    out.row(t) = (valid_correlate_fft(ctx, frm).array() / (win_norms.row(t).transpose() * fn))
                     .transpose();
  }

  const int ifrm = frames.id();
  std::function<void(Tape&, int)> pull;
  if (frames.requires_grad()) {
    const Arr ctx_copy = contexts;
    pull = [ifrm, ctx_copy, win_norms, T, L](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      const Arr& fv = t.node(ifrm).value;
      const Arr& ov = t.node(self).value;
      Arr gf = Arr::Zero(T, L);
      for (Eigen::Index tt = 0; tt < T; ++tt) {
        const double norm = std::sqrt((fv.row(tt) * fv.row(tt)).sum());
        const double B = std::max(norm, kNccNormFloor);
        // d/dy [ (c_j . y) / (A_j B) ] = c_j/(A_j B) - f_j y / B^2 (if ||y|| > floor)
        for (Eigen::Index j = 0; j < 2 * L + 1; ++j) {
          const double gj = g(tt, j);
          if (gj == 0.0) continue;
          gf.row(tt) += (gj / (win_norms(tt, j) * B)) * ctx_copy.row(tt).segment(j, L);
        }
        if (norm > kNccNormFloor) {
          const double coeff = (g.row(tt) * ov.row(tt)).sum() / (B * B);
          gf.row(tt) -= coeff * fv.row(tt);
        }
      }
      t.accumulate(ifrm, gf);
    };
  }
  return Var(&tape, tape.add(std::move(out), frames.requires_grad(), std::move(pull)));
}

Var overlap_add_rows(Var frames, const FrameGrid& grid) {
  Tape& tape = *frames.tape();
  require(frames.rows() == grid.n_frames && frames.cols() == grid.frame_len,
          "overlap_add_rows: shape mismatch with grid");
  const Eigen::VectorXi counts = overlap_counts(grid);
  Arr out = Arr::Zero(1, grid.total_len);
  for (int t = 0; t < grid.n_frames; ++t) {
    const long start = static_cast<long>(t) * grid.hop;
    const long hi = std::min<long>(start + grid.frame_len, grid.total_len);
    if (hi > start) out.row(0).segment(start, hi - start) += frames.value().row(t).head(hi - start);
  }
  for (long n = 0; n < grid.total_len; ++n) out(0, n) /= counts[n];

  const int ifr = frames.id();
  std::function<void(Tape&, int)> pull;
  if (frames.requires_grad()) {
    pull = [ifr, grid, counts](Tape& t, int self) {
      const Arr& g = t.node(self).grad;
      Arr gf = Arr::Zero(grid.n_frames, grid.frame_len);
      for (int tt = 0; tt < grid.n_frames; ++tt) {
        const long start = static_cast<long>(tt) * grid.hop;
        const long hi = std::min<long>(start + grid.frame_len, grid.total_len);
        for (long n = start; n < hi; ++n) gf(tt, n - start) = g(0, n) / counts[n];
      }
      t.accumulate(ifr, gf);
    };
  }
  return Var(&tape, tape.add(std::move(out), frames.requires_grad(), std::move(pull)));
}

Var mean_all(Var a) { return mul_scalar(sum_all(a), 1.0 / static_cast<double>(a.value().size())); }

}  // namespace fasbeam::ad
