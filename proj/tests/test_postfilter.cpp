// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cepnet/errors.hpp"
#include "cepnet/fft.hpp"
#include "cepnet/g711.hpp"
#include "cepnet/metrics.hpp"
#include "cepnet/postfilter.hpp"
#include "cepnet/speech_synth.hpp"
#include "test_util.hpp"

namespace cepnet::postfilter {
namespace {

using g711::Law;

// Encode/decode Gaussian noise with standard deviation 1/load and measure
// the signal-to-quantization-noise ratio in dB.
// Near the overload point the error is dominated by rare clipped samples, so
// the sample count has to be large for a stable estimate.
double measured_snr_db(double load, Law law, std::uint64_t seed, double sign = 1.0,
                       std::size_t n = 400000) {
  const auto x = testing::gaussian(n, 1.0 / load, seed);
  double s = 0.0, e = 0.0;
  for (double v : x) {
    const double in = sign * v;
    const double y = g711::decode(g711::encode(in, law), law);
    s += in * in;
    e += (y - in) * (y - in);
  }
  return 10.0 * std::log10(s / e);
}

double db(double v) { return 10.0 * std::log10(v); }

TEST(Postfilter, SnrTableMatchesMonteCarlo) {
  for (Law law : {Law::kALaw, Law::kMuLaw}) {
    for (int i = 0; i < 60; ++i) {
      const double log_load = -0.5 + 5.0 * i / 59.0;
      const double load = std::pow(10.0, log_load);
      const std::size_t n = log_load > 0.3 && log_load < 0.7 ? 4000000 : 400000;
      EXPECT_NEAR(db(snr_q(load, law)), measured_snr_db(load, law, 1000 + i, 1.0, n), 0.35)
          << g711::law_name(law) << " log10(load)=" << log_load;
    }
  }
}

TEST(Postfilter, ALawPlateau) {
  for (double load : {4.0, 10.0, 30.0, 60.0}) {
    EXPECT_NEAR(db(snr_q(load, Law::kALaw)), 38.0, 2.0) << load;
  }
}

TEST(Postfilter, OverloadDegradesMonotonically) {
  for (Law law : {Law::kALaw, Law::kMuLaw}) {
    double prev = 0.0;
    for (double load = 0.32; load <= 1.0; load += 0.04) {
      const double v = snr_q(load, law);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(Postfilter, SnrSymmetricInSign) {
  for (double load : {0.5, 3.0, 100.0}) {
    EXPECT_NEAR(measured_snr_db(load, Law::kALaw, 7, 1.0),
                measured_snr_db(load, Law::kALaw, 7, -1.0), 0.2);
  }
}

TEST(Postfilter, SnrClampsOutsideTable) {
  EXPECT_EQ(snr_q(1e-3, Law::kALaw), snr_q(std::pow(10.0, -0.5), Law::kALaw));
  EXPECT_EQ(snr_q(1e9, Law::kMuLaw), snr_q(std::pow(10.0, 4.5), Law::kMuLaw));
  EXPECT_THROW(snr_q(0.0, Law::kALaw), ArgumentError);
  EXPECT_THROW(snr_q(-1.0, Law::kALaw), ArgumentError);
}

TEST(Postfilter, NoiseVarianceOfModerateSine) {
  // granular region: the Gaussian model fits any non-clipping waveform
  PostfilterConfig cfg;
  std::vector<double> x(8000);
  for (std::size_t n = 0; n < x.size(); ++n) {
    x[n] = 0.1 * std::sin(2.0 * std::numbers::pi * 437.0 * n / 8000.0 + 0.3);
  }
  double measured = 0.0;
  for (double v : x) {
    const double e = g711::decode(g711::encode(v, Law::kALaw), Law::kALaw) - v;
    measured += e * e;
  }
  measured /= static_cast<double>(x.size());
  const double est = estimate_noise_variance(x, cfg);
  EXPECT_GT(est, measured / 2.0);
  EXPECT_LT(est, measured * 2.0);
}

TEST(Postfilter, NoiseVarianceBasics) {
  PostfilterConfig cfg;
  EXPECT_EQ(estimate_noise_variance(std::vector<double>(32, 0.0), cfg), 0.0);
  EXPECT_THROW(estimate_noise_variance(std::vector<double>{}, cfg), ArgumentError);
  auto x = testing::gaussian(32, 0.01, 3);
  double ms = 0.0;
  for (double v : x) ms += v * v;
  ms /= 32.0;
  const double est = estimate_noise_variance(x, cfg);
  EXPECT_NEAR(est * snr_q(1.0 / std::sqrt(ms), cfg.law), ms, 1e-15);
  for (double& v : x) v *= 10.0;
  EXPECT_NEAR(estimate_noise_variance(x, cfg) * snr_q(1.0 / std::sqrt(100.0 * ms), cfg.law),
              100.0 * ms, 1e-13);
}

TEST(Postfilter, GainFloorOnNoiseOnlySpectrum) {
  PostfilterConfig cfg;
  PostfilterState st;
  std::vector<std::complex<double>> s(64);
  for (std::size_t k = 0; k < 64; ++k) s[k] = std::polar(2.0, 0.1 * k);  // |S|^2 = 4
  const auto g = wiener_gains(s, 4.0, st, cfg);
  for (double v : g) EXPECT_DOUBLE_EQ(v, cfg.gain_min);
  for (double v : st.gain1) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Postfilter, HighSnrIsTransparent) {
  PostfilterConfig cfg;
  PostfilterState st;
  std::vector<std::complex<double>> s(64, std::complex<double>(1000.0, 0.0));
  for (int frame = 0; frame < 3; ++frame) {
    for (double v : wiener_gains(s, 1.0, st, cfg)) EXPECT_GE(v, 0.999);
  }
}

TEST(Postfilter, GainsStayInRange) {
  PostfilterConfig cfg;
  PostfilterState st;
  for (int frame = 0; frame < 200; ++frame) {
    const auto re = testing::gaussian(64, 1.0 + frame % 7, 300 + frame);
    const auto im = testing::gaussian(64, 1.0, 900 + frame);
    std::vector<std::complex<double>> s(64);
    for (std::size_t k = 0; k < 64; ++k) s[k] = {re[k], im[k]};
    const double noise = 0.1 + (frame % 13);
    for (double v : wiener_gains(s, noise, st, cfg)) {
      EXPECT_GE(v, cfg.gain_min);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Postfilter, ZeroNoiseGivesUnitGains) {
  PostfilterConfig cfg;
  PostfilterState st;
  std::vector<std::complex<double>> s(64, {0.3, -0.2});
  for (double v : wiener_gains(s, 0.0, st, cfg)) EXPECT_EQ(v, 1.0);
}

TEST(Postfilter, PassthroughIsPureDelay) {
  PostfilterConfig cfg;
  cfg.noise_scale = 0.0;
  AudioSignal x = synth::generate({.seconds = 2.0, .seed = 4});
  const AudioSignal y = apply(x, cfg);
  ASSERT_EQ(y.size(), x.size());
  double err = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double want = n < 16 ? 0.0 : x.samples[n - 16];
    err = std::max(err, std::abs(y.samples[n] - want));
  }
  EXPECT_LT(err, 1e-6);
  EXPECT_EQ(cfg.delay(), 16u);
}

TEST(Postfilter, WhiteNoiseIsAttenuated) {
  PostfilterConfig cfg;
  AudioSignal x;
  x.samples = testing::gaussian(16000, 0.05, 21);
  const AudioSignal y = apply(x, cfg);
  double vx = 0.0, vy = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    vx += x.samples[n] * x.samples[n];
    vy += y.samples[n] * y.samples[n];
  }
  EXPECT_LE(vy, vx);
}

TEST(Postfilter, SilenceStaysSilent) {
  AudioSignal x;
  x.samples.assign(4000, 0.0);
  const AudioSignal y = apply(x, PostfilterConfig{});
  for (double v : y.samples) EXPECT_EQ(v, 0.0);
}

TEST(Postfilter, DeterministicAndConstrained) {
  PostfilterConfig cfg;
  const AudioSignal clean = synth::generate({.seconds = 3.0, .seed = 8});
  const auto codes = g711::encode(clean.samples, cfg.law);
  AudioSignal coded;
  coded.samples = g711::decode(codes, cfg.law);
  const AudioSignal a = apply(coded, cfg, codes);
  const AudioSignal b = apply(coded, cfg, codes);
  EXPECT_EQ(a.samples, b.samples);
  for (std::size_t n = cfg.delay(); n < a.size(); ++n) {
    const auto q = g711::quant_interval(codes[n - cfg.delay()], cfg.law);
    ASSERT_GE(a.samples[n], q.low);
    ASSERT_LE(a.samples[n], q.high);
  }
}

TEST(Postfilter, RejectsWideband) {
  AudioSignal x;
  x.sample_rate_hz = 16000;
  x.samples.assign(100, 0.0);
  EXPECT_THROW(apply(x, PostfilterConfig{}), ArgumentError);
  PostfilterConfig bad;
  bad.beta = 1.0;
  EXPECT_THROW(bad.validate(), ArgumentError);
  bad = PostfilterConfig{};
  bad.filter_len = 128;
  EXPECT_THROW(bad.validate(), ArgumentError);
}

TEST(Postfilter, LowersLsdOnCodedSpeech) {
  PostfilterConfig cfg;
  const auto metrics_cfg = metrics::MetricsConfig::for_rate(8000);
  double coded_lsd = 0.0, filtered_lsd = 0.0;
  for (std::uint64_t seed = 30; seed < 33; ++seed) {
    const AudioSignal clean = synth::generate({.seconds = 8.0, .seed = seed});
    AudioSignal coded;
    coded.samples = g711::decode(g711::encode(clean.samples, cfg.law), cfg.law);
    AudioSignal y = apply(coded, cfg);
    y.samples.erase(y.samples.begin(), y.samples.begin() + 16);
    AudioSignal ref = clean;
    ref.samples.resize(y.size());
    AudioSignal cod = coded;
    cod.samples.resize(y.size());
    coded_lsd += metrics::lsd(ref, cod, metrics_cfg);
    filtered_lsd += metrics::lsd(ref, y, metrics_cfg);
  }
  EXPECT_LT(filtered_lsd, coded_lsd);
}

}  // namespace
}  // namespace cepnet::postfilter
