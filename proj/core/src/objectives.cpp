#include "fasbeam/objectives.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace fasbeam {

namespace {
double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }
}  // namespace

MelBank MelBank::make(int fft_size, int sample_rate, int bands, double f_low, double f_high) {
  require(bands >= 1, "MelBank: need at least one band");
  f_high = std::min(f_high, sample_rate / 2.0);
  require(f_low >= 0.0 && f_low < f_high, "MelBank: bad frequency range");
  const int F = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(f_low), mel_hi = hz_to_mel(f_high);
  // bands+2 edge frequencies, triangles between consecutive triples
  Vec edges(bands + 2);
  for (int b = 0; b < bands + 2; ++b)
    edges[b] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * b / (bands + 1));
  MelBank bank;
  bank.f_low = f_low;
  bank.f_high = f_high;
  bank.weights = Mat::Zero(F, bands);
  for (int k = 0; k < F; ++k) {
    const double f = static_cast<double>(k) * sample_rate / fft_size;
    for (int b = 0; b < bands; ++b) {
      const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
      if (f > lo && f < mid)
        bank.weights(k, b) = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        bank.weights(k, b) = (hi - f) / (hi - mid);
    }
  }
  for (int b = 0; b < bands; ++b)
    require(bank.weights.col(b).sum() > 0.0,
            "MelBank: empty filter (increase fft_size or band spacing)");
  return bank;
}

double si_snr(const Vec& estimate, const Vec& target) {
  require(estimate.size() == target.size(), "si_snr: length mismatch");
  require(estimate.size() >= 1, "si_snr: empty signals");
  Vec y = target.array() - target.mean();
  Vec e = estimate.array() - estimate.mean();
  const double ty = y.squaredNorm();
  require(ty > 0.0, "si_snr: target has zero variance");
  if (e.squaredNorm() == 0.0) return -std::numeric_limits<double>::infinity();
  const Vec s = (e.dot(y) / ty) * y;
  const double num = s.squaredNorm();
  const double den = (e - s).squaredNorm();
  if (den == 0.0) return kSiSnrCapDb;
  if (num == 0.0) return -std::numeric_limits<double>::infinity();
  return std::min(10.0 * std::log10(num / den), kSiSnrCapDb);
}

double si_snr_improvement(const Vec& estimate, const Vec& target, const Vec& mixture_ref_channel) {
  return si_snr(estimate, target) - si_snr(mixture_ref_channel, target);
}

UpitResult upit_loss(const std::vector<Vec>& estimates, const std::vector<Vec>& targets,
                     const std::function<double(const Vec&, const Vec&)>& per_pair_loss) {
  const int C = static_cast<int>(estimates.size());
  require(C >= 1 && C <= 4, "upit_loss: C must be in [1, 4]");
  require(targets.size() == estimates.size(), "upit_loss: estimate/target count mismatch");

  Mat pair_losses(C, C);
  for (int e = 0; e < C; ++e)
    for (int t = 0; t < C; ++t) pair_losses(e, t) = per_pair_loss(estimates[e], targets[t]);

  std::vector<int> perm(C);
  std::iota(perm.begin(), perm.end(), 0);
  UpitResult best;
  best.loss = std::numeric_limits<double>::infinity();
  do {
    double loss = 0.0;
    for (int e = 0; e < C; ++e) loss += pair_losses(e, perm[e]);
    loss /= C;
    if (loss < best.loss) {
      best.loss = loss;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double shift_invariant_si_snr(const Vec& estimate, const Vec& target, double max_shift_ms,
                              int sample_rate) {
  require(estimate.size() == target.size(), "shift_invariant_si_snr: length mismatch");
  const long max_shift = static_cast<long>(std::lround(max_shift_ms * sample_rate / 1000.0));
  require(max_shift < estimate.size(), "shift_invariant_si_snr: shift range exceeds signal");
  double best = -std::numeric_limits<double>::infinity();
  for (long s = -max_shift; s <= max_shift; ++s) {
    const long e0 = std::max(s, 0L), t0 = std::max(-s, 0L);
    const long n = estimate.size() - std::abs(s);
    best = std::max(best, si_snr(estimate.segment(e0, n), target.segment(t0, n)));
  }
  return best;
}

double mel_si_mse(const Vec& estimate, const Vec& target, const StftConfig& cfg,
                  const MelBank& mel) {
  require(estimate.size() == target.size(), "mel_si_mse: length mismatch");
  const double ne = estimate.norm(), nt = target.norm();
  require(ne > 0.0 && nt > 0.0, "mel_si_mse: zero-norm signal");
  require(mel.weights.rows() == cfg.bins(), "mel_si_mse: mel bank does not match fft size");
  const CMat se = stft(Vec(estimate / ne), cfg);
  const CMat st = stft(Vec(target / nt), cfg);
  const Mat me = se.cwiseAbs() * mel.weights;
  const Mat mt = st.cwiseAbs() * mel.weights;
  return (me - mt).squaredNorm() / static_cast<double>(me.size());
}

}  // namespace fasbeam
