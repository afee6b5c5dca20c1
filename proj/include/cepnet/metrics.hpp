// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_METRICS_HPP_
#define CEPNET_METRICS_HPP_

#include <vector>

#include "cepnet/audio_io.hpp"

namespace cepnet::metrics {

// Frames are 32 ms periodic Hann with 50% overlap, starting at sample 0. Only
// complete frames are scored; a signal shorter than one frame is scored as a
// single zero-padded frame.
struct MetricsConfig {
  double vad_threshold = 0.1;
  std::size_t fft_len = 512;  // K
  std::size_t k_low = 3;
  std::size_t k_high = 217;
  double r_min_db = -10.0;
  double r_max_db = 40.0;
  double frame_ms = 32.0;

  // Band limits of 50..3400 Hz at 8 kHz and 50..7000 Hz at 16 kHz.
  static MetricsConfig for_rate(int sample_rate_hz);
  void validate() const;
};

struct MetricsReport {
  double mean_lsd_db = 0.0;
  double ssdr_seg_db = 0.0;
  double ssdr_db = 0.0;
  std::size_t active_frame_count = 0;
  std::size_t frame_count = 0;
};

std::size_t frame_length(const MetricsConfig& cfg, int sample_rate_hz);
std::size_t frame_count(std::size_t signal_length, std::size_t frame_len);

// Frame l is active when its mean square over the file mean square exceeds
// the threshold. An all-zero file has no active frames.
std::vector<std::size_t> vad(const AudioSignal& reference, const MetricsConfig& cfg);

// Per-frame values for every frame of the grid.
std::vector<double> lsd_frames(const AudioSignal& reference,
                               const AudioSignal& processed, const MetricsConfig& cfg);
std::vector<double> ssdr_frames(const AudioSignal& reference,
                                const AudioSignal& processed, const MetricsConfig& cfg);

// Means over the active frames of the reference. Throw DataError when the
// reference has no active frame.
double lsd(const AudioSignal& reference, const AudioSignal& processed,
           const MetricsConfig& cfg);
double ssdr_seg(const AudioSignal& reference, const AudioSignal& processed,
                const MetricsConfig& cfg);
// Whole-file ratio, no clamp and no VAD; +inf for an exact match.
double ssdr(const AudioSignal& reference, const AudioSignal& processed);

MetricsReport evaluate(const AudioSignal& reference, const AudioSignal& processed,
                       const MetricsConfig& cfg);

}  // namespace cepnet::metrics

#endif  // CEPNET_METRICS_HPP_
