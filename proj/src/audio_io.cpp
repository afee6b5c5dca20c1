// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/audio_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "cepnet/errors.hpp"

namespace cepnet {
namespace {

constexpr std::uint16_t kFormatPcm = 1;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace

bool is_supported_rate(int sample_rate_hz) {
  return sample_rate_hz == 8000 || sample_rate_hz == 16000;
}

void validate(const AudioSignal& signal) {
  if (!is_supported_rate(signal.sample_rate_hz)) {
    throw ArgumentError("unsupported sample rate " +
                        std::to_string(signal.sample_rate_hz));
  }
  for (double s : signal.samples) {
    if (!(s >= -1.0 && s < 1.0)) {
      throw ArgumentError("sample outside [-1, 1)");
    }
  }
}

std::int16_t to_pcm16(double sample) {
  // std::round rounds half away from zero.
  const double scaled = std::round(sample * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

void clamp_to_pcm_range(std::vector<double>& samples) {
  constexpr double kMax = 32767.0 / 32768.0;
  for (double& s : samples) s = std::clamp(s, -1.0, kMax);
}

double rms_dbfs(const AudioSignal& signal) {
  double acc = 0.0;
  for (double s : signal.samples) acc += s * s;
  if (acc <= 0.0) return -INFINITY;
  return 10.0 * std::log10(acc / static_cast<double>(signal.size()));
}

void scale_to_rms_dbfs(AudioSignal& signal, double dbfs) {
  const double current = rms_dbfs(signal);
  if (std::isinf(current)) return;
  const double gain = std::pow(10.0, (dbfs - current) / 20.0);
  for (double& s : signal.samples) s *= gain;
  clamp_to_pcm_range(signal.samples);
}

AudioSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(path.string() + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  int rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > bytes.size()) {
        throw CorruptFileError(path.string() + ": truncated fmt chunk");
      }
      const std::uint16_t format = read_u16(bytes.data() + body);
      const std::uint16_t channels = read_u16(bytes.data() + body + 2);
      rate = static_cast<int>(read_u32(bytes.data() + body + 4));
      const std::uint16_t bits = read_u16(bytes.data() + body + 14);
      if (format != kFormatPcm) throw FormatError(path.string() + ": not PCM");
      if (channels != 1) throw FormatError(path.string() + ": not mono");
      if (bits != 16) throw FormatError(path.string() + ": not 16-bit");
      if (!is_supported_rate(rate)) {
        throw FormatError(path.string() + ": unsupported rate " +
                          std::to_string(rate));
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError(path.string() + ": data before fmt");
      if (body + chunk_size > bytes.size() || chunk_size % 2 != 0) {
        throw CorruptFileError(path.string() + ": truncated data chunk");
      }
      AudioSignal signal;
      signal.sample_rate_hz = rate;
      signal.samples.resize(chunk_size / 2);
      for (std::size_t i = 0; i < signal.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(read_u16(bytes.data() + body + 2 * i));
        signal.samples[i] = from_pcm16(v);
      }
      return signal;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!have_fmt) throw FormatError(path.string() + ": missing fmt chunk");
  throw CorruptFileError(path.string() + ": missing data chunk");
}

void write_wav(const AudioSignal& signal, const std::filesystem::path& path) {
  if (!is_supported_rate(signal.sample_rate_hz)) {
    throw ArgumentError("unsupported sample rate " +
                        std::to_string(signal.sample_rate_hz));
  }
  const auto data_bytes = static_cast<std::uint32_t>(signal.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate_hz) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : signal.samples) {
    if (std::isnan(s)) throw ArgumentError("NaN sample");
    put_u16(out, static_cast<std::uint16_t>(to_pcm16(s)));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

}  // namespace cepnet
