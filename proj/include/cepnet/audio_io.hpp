// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_AUDIO_IO_HPP_
#define CEPNET_AUDIO_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cepnet {

// Mono signal, samples normalized to [-1, 1) (int16 / 32768).
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate_hz = 8000;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

bool is_supported_rate(int sample_rate_hz);

// Throws ArgumentError if the rate is unsupported or a sample is outside
// [-1, 1).
void validate(const AudioSignal& signal);

// Round half away from zero, then saturate to the int16 range.
std::int16_t to_pcm16(double sample);
inline double from_pcm16(std::int16_t v) { return v / 32768.0; }

// Saturates every sample into [-1, 32767/32768].
void clamp_to_pcm_range(std::vector<double>& samples);

// RMS level in dB relative to full scale (1.0); -inf for silence.
double rms_dbfs(const AudioSignal& signal);
// Scales the signal to the given RMS level, then saturates. Silence is left
// untouched.
void scale_to_rms_dbfs(AudioSignal& signal, double dbfs);

// Reads RIFF/WAVE PCM16 mono at 8 or 16 kHz. Throws FormatError for other
// layouts and CorruptFileError for truncated chunks.
AudioSignal read_wav(const std::filesystem::path& path);

// Writes RIFF/WAVE PCM16 mono. Throws IoError on failure.
void write_wav(const AudioSignal& signal, const std::filesystem::path& path);

}  // namespace cepnet

#endif  // CEPNET_AUDIO_IO_HPP_
