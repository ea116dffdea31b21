// RIFF/WAV file I/O, PCM16 and IEEE float32 only, multichannel interleaved.
#ifndef FASBEAM_WAV_HPP
#define FASBEAM_WAV_HPP

#include <string>

#include "fasbeam/signal.hpp"

namespace fasbeam {

enum class WavEncoding { kPcm16, kFloat32 };

// PCM16 samples are scaled to [-1, 1) by 1/32768; float32 is read as-is.
MultichannelSignal read_wav(const std::string& path);

void write_wav(const std::string& path, const MultichannelSignal& signal,
               WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace fasbeam

#endif  // FASBEAM_WAV_HPP
