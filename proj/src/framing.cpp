// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/framing.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "cepnet/errors.hpp"

namespace cepnet {
namespace {

const FrameworkStructure kStructures[] = {
    {StructureId::kTime, 10, 10, 10, WindowShape::kRect, Reconstruction::kConcat, 0},
    {StructureId::kS1, 32, 32, 10, WindowShape::kRect, Reconstruction::kDropPast, 0},
    {StructureId::kS2, 15, 16, 5, WindowShape::kPeriodicHann, Reconstruction::kOverlapAdd, 10},
    {StructureId::kS3, 20, 32, 10, WindowShape::kPeriodicHann, Reconstruction::kOverlapAdd, 10},
    {StructureId::kS4, 32, 32, 20, WindowShape::kRect, Reconstruction::kDropPast, 0},
    {StructureId::kS5, 25, 32, 20, WindowShape::kFlatTopHann, Reconstruction::kOverlapAdd, 5},
    {StructureId::kS6, 32, 32, 16, WindowShape::kPeriodicHann, Reconstruction::kOverlapAdd, 16},
};

constexpr std::string_view kNames[] = {"time", "s1", "s2", "s3", "s4", "s5", "s6"};

std::size_t ms_to_samples(double ms, int rate) {
  return static_cast<std::size_t>(std::lround(ms * rate / 1000.0));
}

std::vector<double> periodic_hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                 static_cast<double>(n)));
  }
  return w;
}

}  // namespace

const FrameworkStructure& structure(StructureId id) {
  return kStructures[static_cast<int>(id)];
}

StructureId parse_structure(std::string_view name) {
  for (int i = 0; i < 7; ++i) {
    if (kNames[i] == name) return static_cast<StructureId>(i);
  }
  throw ArgumentError("unknown structure '" + std::string(name) + "'");
}

std::string_view structure_name(StructureId id) {
  return kNames[static_cast<int>(id)];
}

const std::vector<StructureId>& all_structures() {
  static const std::vector<StructureId> kAll = {
      StructureId::kTime, StructureId::kS1, StructureId::kS2, StructureId::kS3,
      StructureId::kS4,   StructureId::kS5, StructureId::kS6};
  return kAll;
}

FrameGeometry geometry(const FrameworkStructure& s, int sample_rate_hz) {
  FrameGeometry g;
  g.window_len = ms_to_samples(s.window_ms, sample_rate_hz);
  g.processing_len = ms_to_samples(s.processing_ms, sample_rate_hz);
  g.shift = ms_to_samples(s.shift_ms, sample_rate_hz);
  switch (s.reconstruction) {
    case Reconstruction::kConcat:
      g.lead_pad = 0;
      g.delay = 0;
      break;
    case Reconstruction::kDropPast:
      // The newest `shift` samples of frame 0 are input samples [0, shift).
      g.lead_pad = g.window_len - g.shift;
      g.delay = 0;
      break;
    case Reconstruction::kOverlapAdd:
      // A sample is complete once the last window covering it has arrived.
      g.lead_pad = g.window_len - g.shift;
      g.delay = g.lead_pad;
      break;
  }
  return g;
}

std::vector<double> analysis_window(const FrameworkStructure& s,
                                    int sample_rate_hz) {
  const FrameGeometry g = geometry(s, sample_rate_hz);
  switch (s.window) {
    case WindowShape::kRect:
      return std::vector<double>(g.window_len, 1.0);
    case WindowShape::kPeriodicHann:
      return periodic_hann(g.window_len);
    case WindowShape::kFlatTopHann: {
      // Hann rise over the overlap region, flat top, mirrored fall.
      const std::size_t ramp = g.window_len - g.shift;
      const std::vector<double> hann = periodic_hann(2 * ramp);
      std::vector<double> w(g.window_len, 1.0);
      for (std::size_t i = 0; i < ramp; ++i) {
        w[i] = hann[i];
        w[g.window_len - ramp + i] = hann[ramp + i];
      }
      return w;
    }
  }
  return {};
}

double overlap_sum(const FrameworkStructure& s, int sample_rate_hz) {
  if (s.reconstruction != Reconstruction::kOverlapAdd) return 1.0;
  const std::vector<double> w = analysis_window(s, sample_rate_hz);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  return total / static_cast<double>(geometry(s, sample_rate_hz).shift);
}

double latency_ms(const FrameworkStructure& s) { return s.extra_delay_ms; }

FrameSequence analyze(const AudioSignal& signal, const FrameworkStructure& s) {
  FrameSequence seq;
  seq.structure = s;
  seq.sample_rate_hz = signal.sample_rate_hz;
  seq.signal_length = signal.samples.size();
  if (signal.samples.empty()) return seq;

  const FrameGeometry g = geometry(s, signal.sample_rate_hz);
  const std::vector<double> w = analysis_window(s, signal.sample_rate_hz);
  const std::size_t n = signal.samples.size();
  const std::size_t count = (n + g.delay + g.shift - 1) / g.shift;

  seq.frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> frame(g.processing_len, 0.0);
    const std::size_t start = i * g.shift;  // padded coordinates
    for (std::size_t j = 0; j < g.window_len; ++j) {
      const std::size_t p = start + j;
      if (p < g.lead_pad) continue;
      const std::size_t src = p - g.lead_pad;
      if (src >= n) break;
      frame[j] = signal.samples[src] * w[j];
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

AudioSignal reconstruct(const FrameSequence& seq) {
  const FrameworkStructure& s = seq.structure;
  const FrameGeometry g = geometry(s, seq.sample_rate_hz);
  AudioSignal out;
  out.sample_rate_hz = seq.sample_rate_hz;
  const std::size_t total = seq.signal_length + g.delay;
  out.samples.assign(total, 0.0);
  if (seq.frames.empty()) return out;

  for (const auto& f : seq.frames) {
    if (f.size() != g.processing_len) {
      throw ArgumentError("reconstruct: frame length " + std::to_string(f.size()) +
                          " != " + std::to_string(g.processing_len));
    }
  }

  switch (s.reconstruction) {
    case Reconstruction::kConcat:
      for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        for (std::size_t j = 0; j < g.shift; ++j) {
          const std::size_t t = i * g.shift + j;
          if (t < total) out.samples[t] = seq.frames[i][j];
        }
      }
      break;
    case Reconstruction::kDropPast:
      for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        const std::size_t tail = g.window_len - g.shift;
        for (std::size_t j = 0; j < g.shift; ++j) {
          const std::size_t t = i * g.shift + j;
          if (t < total) out.samples[t] = seq.frames[i][tail + j];
        }
      }
      break;
    case Reconstruction::kOverlapAdd: {
      std::vector<double> acc(seq.frames.size() * g.shift + g.window_len, 0.0);
      for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        for (std::size_t j = 0; j < g.window_len; ++j) {
          acc[i * g.shift + j] += seq.frames[i][j];
        }
      }
      const double norm = 1.0 / overlap_sum(s, seq.sample_rate_hz);
      // The first `delay` output samples stem from the lead-in padding only.
      for (std::size_t t = g.delay; t < total; ++t) out.samples[t] = acc[t] * norm;
      break;
    }
  }
  return out;
}

}  // namespace cepnet
