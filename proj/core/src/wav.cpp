#include "fasbeam/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace fasbeam {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

template <typename T>
T read_le(std::istream& in, const std::string& what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw InvalidInput("read_wav: truncated file while reading " + what);
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

MultichannelSignal read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "read_wav: cannot open " + path);

  char tag[4];
  if (!in.read(tag, 4) || std::memcmp(tag, "RIFF", 4) != 0)
    throw InvalidInput("read_wav: not a RIFF file: " + path);
  read_le<std::uint32_t>(in, "RIFF size");
  if (!in.read(tag, 4) || std::memcmp(tag, "WAVE", 4) != 0)
    throw InvalidInput("read_wav: not a WAVE file: " + path);

  FmtChunk fmt;
  bool have_fmt = false;
  std::vector<char> data;
  while (in.read(tag, 4)) {
    std::uint32_t chunk_size = read_le<std::uint32_t>(in, "chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      require(chunk_size >= 16, "read_wav: malformed fmt chunk");
      fmt.format = read_le<std::uint16_t>(in, "format");
      fmt.channels = read_le<std::uint16_t>(in, "channels");
      fmt.sample_rate = read_le<std::uint32_t>(in, "sample rate");
      read_le<std::uint32_t>(in, "byte rate");
      read_le<std::uint16_t>(in, "block align");
      fmt.bits = read_le<std::uint16_t>(in, "bits per sample");
      in.seekg(chunk_size - 16 + (chunk_size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(chunk_size);
      if (!in.read(data.data(), chunk_size))
        throw InvalidInput("read_wav: truncated data chunk in " + path);
      break;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  require(have_fmt, "read_wav: missing fmt chunk in " + path);
  require(!data.empty(), "read_wav: missing or empty data chunk in " + path);
  require(fmt.channels >= 1, "read_wav: zero channels in " + path);

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool f32 = fmt.format == kFormatFloat && fmt.bits == 32;
  require(pcm16 || f32, "read_wav: unsupported encoding (only PCM16 and float32): " + path);

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  require(data.size() % frame_bytes == 0, "read_wav: data chunk not frame-aligned in " + path);
  const std::size_t n_samples = data.size() / frame_bytes;
  require(n_samples >= 1, "read_wav: empty audio in " + path);

  MultichannelSignal sig;
  sig.sample_rate = static_cast<int>(fmt.sample_rate);
  sig.samples.resize(fmt.channels, static_cast<Eigen::Index>(n_samples));
  const char* p = data.data();
  for (std::size_t n = 0; n < n_samples; ++n) {
    for (std::uint16_t c = 0; c < fmt.channels; ++c) {
      if (pcm16) {
        std::int16_t v;
        std::memcpy(&v, p, 2);
        sig.samples(c, n) = static_cast<double>(v) / 32768.0;
        p += 2;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        sig.samples(c, n) = static_cast<double>(v);
        p += 4;
      }
    }
  }
  return sig;
}

void write_wav(const std::string& path, const MultichannelSignal& signal, WavEncoding encoding) {
  signal.validate();
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_wav: cannot open " + path);

  const std::uint16_t channels = static_cast<std::uint16_t>(signal.channels());
  const std::uint32_t n = static_cast<std::uint32_t>(signal.length());
  const bool f32 = encoding == WavEncoding::kFloat32;
  const std::uint16_t bits = f32 ? 32 : 16;
  const std::uint32_t data_bytes = n * channels * (bits / 8);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, f32 ? kFormatFloat : kFormatPcm);
  write_le<std::uint16_t>(out, channels);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(signal.sample_rate));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(signal.sample_rate) * channels * (bits / 8));
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels * (bits / 8)));
  write_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_bytes);

  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      const double v = signal.samples(c, i);
      if (f32) {
        write_le<float>(out, static_cast<float>(v));
      } else {
        double scaled = v * 32768.0;
        scaled = std::min(std::max(scaled, -32768.0), 32767.0);
        write_le<std::int16_t>(out, static_cast<std::int16_t>(std::lrint(scaled)));
      }
    }
  }
  require(out.good(), "write_wav: write failed for " + path);
}

}  // namespace fasbeam
