// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cepnet/errors.hpp"
#include "cepnet/framing.hpp"
#include "test_util.hpp"

namespace cepnet {
namespace {

AudioSignal noise(std::size_t n, int rate, std::uint64_t seed) {
  AudioSignal s;
  s.sample_rate_hz = rate;
  s.samples = testing::uniform(n, -0.5, 0.5, seed);
  return s;
}

TEST(Framing, StructureTable) {
  struct Row {
    StructureId id;
    double w, p, h;
    WindowShape win;
    Reconstruction rec;
    double delay;
  };
  const Row rows[] = {
      {StructureId::kTime, 10, 10, 10, WindowShape::kRect, Reconstruction::kConcat, 0},
      {StructureId::kS1, 32, 32, 10, WindowShape::kRect, Reconstruction::kDropPast, 0},
      {StructureId::kS2, 15, 16, 5, WindowShape::kPeriodicHann, Reconstruction::kOverlapAdd, 10},
      {StructureId::kS3, 20, 32, 10, WindowShape::kPeriodicHann, Reconstruction::kOverlapAdd, 10},
      {StructureId::kS4, 32, 32, 20, WindowShape::kRect, Reconstruction::kDropPast, 0},
      {StructureId::kS5, 25, 32, 20, WindowShape::kFlatTopHann, Reconstruction::kOverlapAdd, 5},
      {StructureId::kS6, 32, 32, 16, WindowShape::kPeriodicHann, Reconstruction::kOverlapAdd, 16},
  };
  for (const Row& r : rows) {
    const FrameworkStructure& s = structure(r.id);
    EXPECT_EQ(s.window_ms, r.w);
    EXPECT_EQ(s.processing_ms, r.p);
    EXPECT_EQ(s.shift_ms, r.h);
    EXPECT_EQ(s.window, r.win);
    EXPECT_EQ(s.reconstruction, r.rec);
    EXPECT_EQ(latency_ms(s), r.delay);
    EXPECT_LE(s.shift_ms, s.window_ms);
    EXPECT_LE(s.window_ms, s.processing_ms);
    EXPECT_EQ(parse_structure(structure_name(r.id)), r.id);
    // the delay in samples is the latency at both rates
    for (int rate : {8000, 16000}) {
      EXPECT_EQ(geometry(s, rate).delay, static_cast<std::size_t>(r.delay * rate / 1000));
    }
  }
  EXPECT_THROW(parse_structure("s7"), ArgumentError);
}

TEST(Framing, ConstantSignalS3Frames) {
  AudioSignal s;
  s.samples.assign(8000, 1.0);
  const FrameSequence seq = analyze(s, structure(StructureId::kS3));
  ASSERT_GT(seq.frames.size(), 10u);
  const auto& f = seq.frames[5];
  ASSERT_EQ(f.size(), 256u);
  for (std::size_t i = 0; i < 160; ++i) {
    EXPECT_NEAR(f[i], 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / 160.0)), 1e-15);
  }
  for (std::size_t i = 160; i < 256; ++i) EXPECT_EQ(f[i], 0.0);
}

TEST(Framing, FrameCounts) {
  const AudioSignal s = noise(800, 8000, 1);  // 100 ms
  const FrameSequence seq = analyze(s, structure(StructureId::kS1));
  EXPECT_EQ(seq.frames.size(), 10u);
  for (const auto& f : seq.frames) EXPECT_EQ(f.size(), 256u);
  EXPECT_TRUE(analyze(AudioSignal{}, structure(StructureId::kS3)).frames.empty());
}

TEST(Framing, TimeStructureIsRawBlocks) {
  const AudioSignal s = noise(800, 8000, 2);
  const FrameSequence seq = analyze(s, structure(StructureId::kTime));
  ASSERT_EQ(seq.frames.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    ASSERT_EQ(seq.frames[i].size(), 80u);
    for (std::size_t j = 0; j < 80; ++j) EXPECT_EQ(seq.frames[i][j], s.samples[i * 80 + j]);
  }
}

TEST(Framing, PerfectReconstructionEveryStructure) {
  for (int rate : {8000, 16000}) {
    const AudioSignal s = noise(static_cast<std::size_t>(rate) + 37, rate, 3);
    for (StructureId id : all_structures()) {
      const FrameSequence seq = analyze(s, structure(id));
      const AudioSignal r = reconstruct(seq);
      const std::size_t d = geometry(structure(id), rate).delay;
      ASSERT_EQ(r.size(), s.size() + d);
      for (std::size_t i = 0; i < d; ++i) EXPECT_EQ(r.samples[i], 0.0);
      double err = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        err = std::max(err, std::abs(r.samples[i + d] - s.samples[i]));
      }
      EXPECT_LT(err, 1e-9) << structure_name(id) << " @" << rate;
    }
  }
}

TEST(Framing, OverlapSums) {
  EXPECT_DOUBLE_EQ(overlap_sum(structure(StructureId::kS2), 8000), 1.5);
  EXPECT_DOUBLE_EQ(overlap_sum(structure(StructureId::kS3), 8000), 1.0);
  EXPECT_DOUBLE_EQ(overlap_sum(structure(StructureId::kS5), 8000), 1.0);
  EXPECT_DOUBLE_EQ(overlap_sum(structure(StructureId::kS6), 8000), 1.0);
  EXPECT_DOUBLE_EQ(overlap_sum(structure(StructureId::kS1), 8000), 1.0);
}

TEST(Framing, ColaInterior) {
  for (StructureId id : {StructureId::kS2, StructureId::kS3, StructureId::kS5, StructureId::kS6}) {
    const auto w = analysis_window(structure(id), 8000);
    const FrameGeometry g = geometry(structure(id), 8000);
    std::vector<double> acc(20 * g.shift + g.window_len, 0.0);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < g.window_len; ++j) acc[i * g.shift + j] += w[j];
    }
    double lo = 1e9, hi = 0.0;
    for (std::size_t t = g.window_len; t < 20 * g.shift; ++t) {
      lo = std::min(lo, acc[t]);
      hi = std::max(hi, acc[t]);
    }
    EXPECT_LT(hi / lo, 1.0 + 1e-12) << structure_name(id);
  }
}

TEST(Framing, FlatTopWindowShape) {
  const auto w = analysis_window(structure(StructureId::kS5), 8000);
  ASSERT_EQ(w.size(), 200u);
  EXPECT_EQ(w[0], 0.0);
  for (std::size_t i = 40; i < 160; ++i) EXPECT_EQ(w[i], 1.0);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_NEAR(w[i] + w[160 + i], 1.0, 1e-15);
}

TEST(Framing, S5LeadsWithFiveMsOfZeros) {
  AudioSignal s;
  s.samples.assign(1600, 0.25);
  const AudioSignal r = reconstruct(analyze(s, structure(StructureId::kS5)));
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(r.samples[i], 0.0);
  EXPECT_NEAR(r.samples[40], 0.25, 1e-12);
}

TEST(Framing, DropPastKeepsFrameTails) {
  const AudioSignal s = noise(1000, 8000, 4);
  FrameSequence seq = analyze(s, structure(StructureId::kS4));
  for (auto& f : seq.frames) {
    for (double& v : f) v = v * 3.0 + 0.125;  // arbitrary frame processing
  }
  const AudioSignal r = reconstruct(seq);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    for (std::size_t j = 0; j < 160 && i * 160 + j < r.size(); ++j) {
      ASSERT_EQ(r.samples[i * 160 + j], seq.frames[i][96 + j]);
    }
  }
}

TEST(Framing, InconsistentFrameLength) {
  FrameSequence seq = analyze(noise(800, 8000, 5), structure(StructureId::kS3));
  seq.frames[2].pop_back();
  EXPECT_THROW(reconstruct(seq), ArgumentError);
}

}  // namespace
}  // namespace cepnet
