// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/speech_synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "cepnet/errors.hpp"

namespace cepnet::synth {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTilt = 0.8;

// Bit-stable across standard libraries, unlike the <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

struct Resonator {
  double a1 = 0.0, a2 = 0.0, gain = 1.0, y1 = 0.0, y2 = 0.0;
  // Unity gain at DC (gain = 1 - a1 - a2) for the vocal-tract cascade;
  // peak-normalized (gain = 1 - r) for the fricative noise shaper.
  void tune(double freq, double bw, double fs, bool unity_dc = false) {
    const double r = std::exp(-kPi * bw / fs);
    a1 = 2.0 * r * std::cos(2.0 * kPi * freq / fs);
    a2 = -r * r;
    gain = unity_dc ? 1.0 - a1 - a2 : 1.0 - r;
  }
  double step(double x) {
    const double y = gain * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

// Cookbook biquad, direct form I.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;

  static Biquad pass(double freq, double q, double fs, bool high) {
    const double w = 2.0 * kPi * freq / fs;
    const double alpha = std::sin(w) / (2.0 * q);
    const double c = std::cos(w);
    const double a0 = 1.0 + alpha;
    Biquad f;
    f.b1 = (high ? -(1.0 + c) : 1.0 - c) / a0;
    f.b0 = f.b2 = (high ? (1.0 + c) : 1.0 - c) / (2.0 * a0);
    f.a1 = -2.0 * c / a0;
    f.a2 = (1.0 - alpha) / a0;
    return f;
  }
  double step(double x) {
    const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    return y;
  }
};

// Telephone channel: 8th-order Butterworth band edges, 300-3400 Hz
// narrowband, 50-7000 Hz wideband.
void band_limit(std::vector<double>& x, double fs) {
  const bool narrow = fs <= 8000.0;
  const double top = narrow ? 3400.0 : 7000.0;
  const double bottom = narrow ? 300.0 : 50.0;
  std::vector<Biquad> chain;
  for (double q : {0.5098, 0.6013, 0.9000, 2.5629}) chain.push_back(Biquad::pass(bottom, q, fs, true));
  for (double q : {0.5098, 0.6013, 0.9000, 2.5629}) chain.push_back(Biquad::pass(top, q, fs, false));
  for (double& v : x) {
    for (Biquad& f : chain) v = f.step(v);
  }
}

struct Vowel {
  std::array<double, 4> formants;
};

constexpr std::array<Vowel, 8> kVowels{{
    {{730, 1090, 2440, 3300}},
    {{270, 2290, 3010, 3400}},
    {{300, 870, 2240, 3200}},
    {{530, 1840, 2480, 3350}},
    {{570, 840, 2410, 3250}},
    {{660, 1720, 2410, 3300}},
    {{440, 1020, 2240, 3150}},
    {{390, 1990, 2550, 3400}},
}};
constexpr std::array<double, 4> kBandwidths{80, 100, 140, 200};

class Voice {
 public:
  Voice(double fs, Rng& rng) : fs_(fs), rng_(rng) {
    base_f0_ = rng_.uniform(95.0, 210.0);
  }

  void silence(std::vector<double>& out, std::size_t n) {
    out.insert(out.end(), n, 0.0);
    for (auto& r : formant_) r.y1 = r.y2 = 0.0;
    tilt1_ = tilt2_ = tilt3_ = prev_ = 0.0;
  }

  void fricative(std::vector<double>& out, std::size_t n) {
    Resonator res;
    const double nyq = fs_ / 2.0;
    res.tune(std::min(rng_.uniform(2300.0, 5500.0), 0.8 * nyq), rng_.uniform(600.0, 1200.0), fs_);
    const double amp = rng_.uniform(0.15, 0.4);
    double hp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double noise = rng_.normal();
      const double d = noise - hp;  // first difference tilts the noise upwards
      hp = noise;
      out.push_back(amp * envelope(i, n) * res.step(d) * 3.0);
    }
  }

  void vowel(std::vector<double>& out, std::size_t n, const Vowel& from, const Vowel& to,
             double f0_start, double f0_end) {
    const double amp = rng_.uniform(0.6, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n);
      const double glide = std::min(1.0, t * 3.0);  // reach the target in the first third
      if (i % 16 == 0) {
        for (std::size_t k = 0; k < 4; ++k) {
          const double f = from.formants[k] + glide * (to.formants[k] - from.formants[k]);
          formant_[k].tune(std::min(f, 0.45 * fs_), kBandwidths[k], fs_, true);
        }
      }
      const double f0 = f0_start + t * (f0_end - f0_start) +
                        2.0 * std::sin(2.0 * kPi * 5.5 * static_cast<double>(i) / fs_);
      phase_ += f0 * (1.0 + 0.01 * rng_.normal()) / fs_;
      double excitation = 0.002 * rng_.normal();  // faint breath
      if (phase_ >= 1.0) {
        phase_ -= 1.0;
        excitation += 1.0;
      }
      // Two-pole glottal tilt, then lip radiation.
      tilt1_ = 0.96 * tilt1_ + excitation;
      tilt2_ = 0.96 * tilt2_ + tilt1_;
      const double radiated = tilt2_ - prev_;
      prev_ = tilt2_;
      // extra source tilt, as in voiced speech with a smooth glottal closure
      tilt3_ = (1.0 - kTilt) * radiated + kTilt * tilt3_;
      // Cascade vocal tract: each resonator has unity gain at DC, so the
      // upper formants fall off naturally.
      double y = tilt3_;
      for (auto& f : formant_) y = f.step(y);
      out.push_back(amp * envelope(i, n) * y);
    }
  }

  double base_f0() const { return base_f0_; }

 private:
  double envelope(std::size_t i, std::size_t n) const {
    const std::size_t ramp = std::min<std::size_t>(n / 4, static_cast<std::size_t>(0.015 * fs_));
    if (ramp == 0) return 1.0;
    double e = 1.0;
    if (i < ramp) e = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / ramp);
    if (n - 1 - i < ramp) e = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(n - 1 - i) / ramp);
    return e;
  }

  double fs_;
  Rng& rng_;
  double base_f0_ = 120.0;
  double phase_ = 0.0;
  double tilt1_ = 0.0, tilt2_ = 0.0, tilt3_ = 0.0, prev_ = 0.0;
  std::array<Resonator, 4> formant_{};
};

}  // namespace

AudioSignal generate(const SynthConfig& cfg) {
  if (!is_supported_rate(cfg.sample_rate_hz)) {
    throw ArgumentError("synth: unsupported sample rate");
  }
  if (!(cfg.seconds > 0.0)) throw ArgumentError("synth: duration must be positive");
  const double fs = cfg.sample_rate_hz;
  const auto total = static_cast<std::size_t>(std::lround(cfg.seconds * fs));
  Rng rng(cfg.seed);
  Voice voice(fs, rng);
  std::vector<double> out;
  out.reserve(total + static_cast<std::size_t>(fs));

  auto ms = [&](double lo, double hi) {
    return static_cast<std::size_t>(rng.uniform(lo, hi) * fs / 1000.0);
  };
  voice.silence(out, ms(50.0, 200.0));
  std::size_t previous = rng.index(kVowels.size());
  while (out.size() < total) {
    const std::size_t syllables = 2 + rng.index(7);
    double f0 = voice.base_f0() * rng.uniform(1.05, 1.25);
    for (std::size_t s = 0; s < syllables && out.size() < total; ++s) {
      if (rng.uniform() < 0.35) voice.fricative(out, ms(40.0, 130.0));
      const std::size_t next = rng.index(kVowels.size());
      const double f0_end = std::max(60.0, f0 * rng.uniform(0.85, 1.02));
      voice.vowel(out, ms(80.0, 260.0), kVowels[previous], kVowels[next], f0, f0_end);
      previous = next;
      f0 = f0_end * rng.uniform(0.98, 1.1);
      if (rng.uniform() < 0.15) voice.silence(out, ms(20.0, 60.0));  // stop closure
    }
    const double pause_scale = cfg.pause_fraction / 0.2;
    voice.silence(out, static_cast<std::size_t>(ms(150.0, 450.0) * pause_scale));
  }
  out.resize(total);
  if (cfg.band_limit) band_limit(out, fs);

  AudioSignal signal;
  signal.sample_rate_hz = cfg.sample_rate_hz;
  signal.samples = std::move(out);
  scale_to_rms_dbfs(signal, cfg.level_dbfs);
  return signal;
}

std::vector<AudioSignal> corpus(std::size_t count, double seconds, int sample_rate_hz,
                                std::uint64_t seed) {
  std::vector<AudioSignal> files;
  files.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SynthConfig cfg;
    cfg.seconds = seconds;
    cfg.sample_rate_hz = sample_rate_hz;
    cfg.seed = seed + i;
    files.push_back(generate(cfg));
  }
  return files;
}

}  // namespace cepnet::synth
