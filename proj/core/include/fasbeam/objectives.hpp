// Training losses and evaluation metrics: SI-SNR and its improvement,
// utterance-level permutation invariant assignment, shift-invariant scoring
// and the mel-spectrogram SI-MSE objective.
#ifndef FASBEAM_OBJECTIVES_HPP
#define FASBEAM_OBJECTIVES_HPP

#include <functional>
#include <vector>

#include "fasbeam/stft.hpp"

namespace fasbeam {

// SI-SNR values are capped here to keep perfect estimates finite.
inline constexpr double kSiSnrCapDb = 60.0;

// Mel filterbank, rows indexed by FFT bin, columns by mel band.
struct MelBank {
  Mat weights;  // F x D
  double f_low = 0.0;
  double f_high = 8000.0;

  int bands() const { return static_cast<int>(weights.cols()); }
  static MelBank make(int fft_size, int sample_rate, int bands = 40, double f_low = 0.0,
                      double f_high = 8000.0);
};

// Scale-invariant SNR in dB. Both signals are zero-meaned first. Returns
// kSiSnrCapDb for a perfect (scaled) estimate and -inf for a zero estimate;
// rejects a zero-variance target.
double si_snr(const Vec& estimate, const Vec& target);

// si_snr(estimate, target) - si_snr(mixture_ref_channel, target).
double si_snr_improvement(const Vec& estimate, const Vec& target, const Vec& mixture_ref_channel);

struct UpitResult {
  double loss = 0.0;
  std::vector<int> permutation;  // estimates[c] is assigned targets[permutation[c]]
};

// Minimum over all C! assignments of the mean pairwise loss; C <= 4.
UpitResult upit_loss(const std::vector<Vec>& estimates, const std::vector<Vec>& targets,
                     const std::function<double(const Vec&, const Vec&)>& per_pair_loss);

// Max of si_snr over integer shifts in +-max_shift_ms, comparing the aligned
// overlap of the two signals.
double shift_invariant_si_snr(const Vec& estimate, const Vec& target, double max_shift_ms,
                              int sample_rate);

// Eqs: L2-normalize each waveform, magnitude STFT, mel projection, mean
// squared error. Rejects zero-norm signals.
double mel_si_mse(const Vec& estimate, const Vec& target, const StftConfig& cfg,
                  const MelBank& mel);

}  // namespace fasbeam

#endif  // FASBEAM_OBJECTIVES_HPP
