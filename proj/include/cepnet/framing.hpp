// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_FRAMING_HPP_
#define CEPNET_FRAMING_HPP_

#include <string_view>
#include <vector>

#include "cepnet/audio_io.hpp"

namespace cepnet {

enum class StructureId { kTime, kS1, kS2, kS3, kS4, kS5, kS6 };
enum class WindowShape { kRect, kPeriodicHann, kFlatTopHann };
enum class Reconstruction { kConcat, kDropPast, kOverlapAdd };

// Windowing/reconstruction settings. kTime is the 10 ms rectangular framer of
// the time-domain approach; kS1..kS6 are the cepstral-domain structures.
struct FrameworkStructure {
  StructureId id = StructureId::kTime;
  double window_ms = 10.0;
  double processing_ms = 10.0;
  double shift_ms = 10.0;
  WindowShape window = WindowShape::kRect;
  Reconstruction reconstruction = Reconstruction::kConcat;
  double extra_delay_ms = 0.0;
};

const FrameworkStructure& structure(StructureId id);
StructureId parse_structure(std::string_view name);  // time, s1..s6
std::string_view structure_name(StructureId id);
const std::vector<StructureId>& all_structures();

// The same settings in samples at a given rate.
struct FrameGeometry {
  std::size_t window_len = 0;
  std::size_t processing_len = 0;
  std::size_t shift = 0;
  std::size_t lead_pad = 0;  // zeros prepended before framing
  std::size_t delay = 0;     // output latency in samples
};

FrameGeometry geometry(const FrameworkStructure& s, int sample_rate_hz);
std::vector<double> analysis_window(const FrameworkStructure& s,
                                    int sample_rate_hz);

// Constant value of the shifted-window sum used to normalize overlap-add
// (1 for non-overlapping structures).
double overlap_sum(const FrameworkStructure& s, int sample_rate_hz);

double latency_ms(const FrameworkStructure& s);

struct FrameSequence {
  std::vector<std::vector<double>> frames;  // each processing_len long
  FrameworkStructure structure;
  int sample_rate_hz = 8000;
  std::size_t signal_length = 0;  // length of the analyzed signal
};

// Frame i covers padded samples [i*shift, i*shift + window_len), windowed and
// zero-padded to processing_len. Enough frames are produced to reconstruct
// every input sample.
FrameSequence analyze(const AudioSignal& signal, const FrameworkStructure& s);

// Inverse of analyze. The result has signal_length + delay samples; the first
// `delay` samples are zero, so dropping them yields the time-aligned signal.
AudioSignal reconstruct(const FrameSequence& frames);

}  // namespace cepnet

#endif  // CEPNET_FRAMING_HPP_
