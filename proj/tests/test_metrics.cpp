// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "cepnet/errors.hpp"
#include "cepnet/metrics.hpp"
#include "cepnet/speech_synth.hpp"
#include "test_util.hpp"

namespace cepnet::metrics {
namespace {

const double kSixDb = 20.0 * std::log10(2.0);

AudioSignal speech(double seconds, std::uint64_t seed) {
  return synth::generate({.seconds = seconds, .seed = seed});
}

AudioSignal scaled(const AudioSignal& s, double g) {
  AudioSignal out = s;
  for (double& v : out.samples) v *= g;
  return out;
}

TEST(Metrics, Bands) {
  const MetricsConfig nb = MetricsConfig::for_rate(8000);
  EXPECT_EQ(nb.k_low, 3u);
  EXPECT_EQ(nb.k_high, 217u);
  const MetricsConfig wb = MetricsConfig::for_rate(16000);
  EXPECT_EQ(wb.k_low, 1u);
  EXPECT_EQ(wb.k_high, 224u);
  EXPECT_THROW(MetricsConfig::for_rate(44100), ArgumentError);
}

TEST(Metrics, FrameGrid) {
  EXPECT_EQ(frame_count(256, 256), 1u);
  EXPECT_EQ(frame_count(100, 256), 1u);
  EXPECT_EQ(frame_count(384, 256), 2u);
  EXPECT_EQ(frame_count(383, 256), 1u);
  EXPECT_EQ(frame_length(MetricsConfig{}, 16000), 512u);
}

TEST(Metrics, IdenticalSignals) {
  const AudioSignal s = speech(4.0, 1);
  const MetricsConfig cfg = MetricsConfig::for_rate(8000);
  EXPECT_EQ(lsd(s, s, cfg), 0.0);
  EXPECT_EQ(ssdr_seg(s, s, cfg), 40.0);
  EXPECT_TRUE(std::isinf(ssdr(s, s)));
}

TEST(Metrics, DoubledGain) {
  const AudioSignal s = speech(4.0, 2);
  const MetricsConfig cfg = MetricsConfig::for_rate(8000);
  const auto frames = lsd_frames(s, scaled(s, 2.0), cfg);
  for (std::size_t l : vad(s, cfg)) EXPECT_NEAR(frames[l], kSixDb, 1e-9);
  EXPECT_NEAR(lsd(s, scaled(s, 2.0), cfg), 6.0206, 1e-4);
}

TEST(Metrics, SignFlip) {
  const AudioSignal s = speech(4.0, 3);
  const MetricsConfig cfg = MetricsConfig::for_rate(8000);
  const auto frames = ssdr_frames(s, scaled(s, -1.0), cfg);
  for (std::size_t l : vad(s, cfg)) EXPECT_NEAR(frames[l], -kSixDb, 1e-9);
  EXPECT_NEAR(ssdr(s, scaled(s, -1.0)), -kSixDb, 1e-9);
}

TEST(Metrics, ZeroDbNoisePerFrame) {
  // An error of the same energy as the reference in every frame.
  const AudioSignal s = speech(4.0, 4);
  AudioSignal p = s;
  for (std::size_t n = 0; n < p.size(); ++n) p.samples[n] += (n % 2 ? 1.0 : -1.0) * s.samples[n];
  EXPECT_NEAR(ssdr_seg(s, p, MetricsConfig::for_rate(8000)), 0.0, 1e-9);
}

TEST(Metrics, Clamps) {
  const AudioSignal s = speech(2.0, 5);
  const MetricsConfig cfg = MetricsConfig::for_rate(8000);
  EXPECT_EQ(ssdr_seg(s, scaled(s, 200.0), cfg), -10.0);
  EXPECT_EQ(ssdr_seg(s, scaled(s, 1.0 + 1e-6), cfg), 40.0);
  for (double v : ssdr_frames(s, scaled(s, 50.0), cfg)) {
    EXPECT_GE(v, -10.0);
    EXPECT_LE(v, 40.0);
  }
  AudioSignal zero;
  zero.samples.assign(2048, 0.0);
  AudioSignal other;
  other.samples = testing::gaussian(2048, 0.1, 1);
  for (double v : ssdr_frames(zero, other, cfg)) EXPECT_EQ(v, -10.0);
  EXPECT_GT(ssdr(s, scaled(s, 1.0 + 1e-6)), 100.0);  // global ratio is not clamped
}

TEST(Metrics, OnePoleFilterOracle) {
  // White noise through 1 / (1 - a z^-1): per-frame LSD of the windowed
  // spectra approaches the RMS of the filter's log response over the band.
  const double a = 0.5;
  AudioSignal x;
  x.samples = testing::gaussian(80000, 0.05, 6);
  AudioSignal y = x;
  for (std::size_t n = 1; n < y.size(); ++n) y.samples[n] = x.samples[n] + a * y.samples[n - 1];
  const MetricsConfig cfg = MetricsConfig::for_rate(8000);
  double acc = 0.0;
  for (std::size_t k = cfg.k_low; k <= cfg.k_high; ++k) {
    const double w = 2.0 * std::numbers::pi * k / cfg.fft_len;
    const double h2 = 1.0 / std::norm(1.0 - a * std::polar(1.0, -w));
    acc += std::pow(10.0 * std::log10(h2), 2);
  }
  const double expected = std::sqrt(acc / (cfg.k_high - cfg.k_low + 1));
  EXPECT_NEAR(lsd(x, y, cfg), expected, 0.3);
}

TEST(Metrics, VadConstantFile) {
  AudioSignal s;
  s.samples.assign(8000, 0.2);
  MetricsConfig cfg;
  for (double theta : {0.0, 0.5, 0.99}) {
    cfg.vad_threshold = theta;
    EXPECT_EQ(vad(s, cfg).size(), frame_count(8000, 256));
  }
}

TEST(Metrics, VadHalfSilenceHalfTone) {
  // 1 kHz at 8 kHz repeats every 8 samples, so every frame holds whole
  // periods: a tone-only frame has mean square a^2/2, the file a^2/4, and a
  // frame holding a fraction f of tone has energy ratio exactly 2f.
  const double amp = 0.3;
  AudioSignal s;
  s.samples.assign(16384, 0.0);
  for (std::size_t n = 8192; n < s.size(); ++n) {
    s.samples[n] = amp * std::sin(2.0 * std::numbers::pi * n / 8.0);
  }
  MetricsConfig cfg;
  const std::size_t count = frame_count(s.size(), 256);
  for (double theta : {0.011, 0.3, 0.99, 1.01, 1.5, 1.89}) {
    cfg.vad_threshold = theta;
    std::vector<std::size_t> expect;
    for (std::size_t l = 0; l < count; ++l) {
      const double start = l * 128.0;
      const double tone = std::clamp(start + 256.0 - 8192.0, 0.0, 256.0) / 256.0;
      if (2.0 * tone > theta) expect.push_back(l);
    }
    EXPECT_EQ(vad(s, cfg), expect) << theta;
    for (std::size_t l : vad(s, cfg)) EXPECT_GE(l * 128 + 256, 8192u);  // no silent frame
  }
}

TEST(Metrics, VadThresholdZeroAndSilence) {
  AudioSignal s = speech(3.0, 7);
  MetricsConfig cfg;
  cfg.vad_threshold = 0.0;
  std::size_t nonzero = 0;
  const std::size_t count = frame_count(s.size(), 256);
  for (std::size_t l = 0; l < count; ++l) {
    double e = 0.0;
    for (std::size_t i = 0; i < 256 && l * 128 + i < s.size(); ++i) e += std::abs(s.samples[l * 128 + i]);
    if (e > 0.0) ++nonzero;
  }
  EXPECT_EQ(vad(s, cfg).size(), nonzero);
  AudioSignal silent;
  silent.samples.assign(4000, 0.0);
  EXPECT_TRUE(vad(silent, cfg).empty());
  EXPECT_THROW(lsd(silent, silent, cfg), DataError);
}

TEST(Metrics, SymmetryAndReferenceOnlyVad) {
  const AudioSignal s = speech(3.0, 8);
  AudioSignal p = s;
  const auto n = testing::gaussian(s.size(), 0.003, 9);
  for (std::size_t i = 0; i < p.size(); ++i) p.samples[i] += n[i];
  const MetricsConfig cfg = MetricsConfig::for_rate(8000);
  const auto a = lsd_frames(s, p, cfg);
  const auto b = lsd_frames(p, s, cfg);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  const auto before = vad(s, cfg);
  EXPECT_EQ(evaluate(s, p, cfg).active_frame_count, before.size());
  EXPECT_EQ(evaluate(s, scaled(p, 0.1), cfg).active_frame_count, before.size());
}

TEST(Metrics, AppendedSilenceInvariance) {
  // Frame ratios here are 0, 1 or 2, far from the threshold, so extra
  // silence moves no frame across it.
  AudioSignal s;
  s.samples.assign(8192, 0.0);
  for (std::size_t n = 0; n < 4096; ++n) {
    s.samples[n] = 0.2 * std::sin(2.0 * std::numbers::pi * n / 8.0) * (1.0 + 0.5 * std::sin(n * 0.001));
  }
  AudioSignal p = scaled(s, 0.9);
  const auto noise = testing::gaussian(p.size(), 0.001, 3);
  for (std::size_t i = 0; i < p.size(); ++i) p.samples[i] += noise[i];
  const MetricsConfig cfg = MetricsConfig::for_rate(8000);
  const double lsd0 = lsd(s, p, cfg);
  const double seg0 = ssdr_seg(s, p, cfg);
  const std::size_t active0 = vad(s, cfg).size();
  s.samples.resize(s.size() + 256 * 8, 0.0);
  p.samples.resize(s.size(), 0.0);
  EXPECT_EQ(vad(s, cfg).size(), active0);
  EXPECT_NEAR(lsd(s, p, cfg), lsd0, 1e-12);
  EXPECT_NEAR(ssdr_seg(s, p, cfg), seg0, 1e-12);
}

TEST(Metrics, ArgumentErrors) {
  AudioSignal a, b;
  a.samples.assign(1000, 0.1);
  b.samples.assign(999, 0.1);
  EXPECT_THROW(lsd(a, b, MetricsConfig{}), ArgumentError);
  b.samples.assign(1000, 0.1);
  b.sample_rate_hz = 16000;
  EXPECT_THROW(ssdr(a, b), ArgumentError);
}

}  // namespace
}  // namespace cepnet::metrics
