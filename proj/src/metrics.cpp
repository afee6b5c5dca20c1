// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cepnet/errors.hpp"
#include "cepnet/fft.hpp"

namespace cepnet::metrics {
namespace {

constexpr double kPowerFloor = 1e-20;

void check_pair(const AudioSignal& a, const AudioSignal& b) {
  if (a.sample_rate_hz != b.sample_rate_hz) {
    throw ArgumentError("metrics: sample rates differ");
  }
  if (a.size() != b.size()) {
    throw ArgumentError("metrics: signal lengths differ (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ArgumentError("metrics: empty signal");
}

// Samples of frame l, zero beyond the end of the signal.
std::vector<double> frame_at(const std::vector<double>& x, std::size_t l,
                             std::size_t len) {
  std::vector<double> out(len, 0.0);
  const std::size_t start = l * (len / 2);
  for (std::size_t i = 0; i < len && start + i < x.size(); ++i) out[i] = x[start + i];
  return out;
}

double mean_square(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

std::vector<double> power_spectrum(const std::vector<double>& frame,
                                   const std::vector<double>& window, std::size_t k) {
  std::vector<double> tmp(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) tmp[i] = frame[i] * window[i];
  const auto spec = fft::forward_real(tmp, k);
  std::vector<double> p(k / 2 + 1);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(spec[i]);
  return p;
}

double active_mean(const AudioSignal& reference, const MetricsConfig& cfg,
                   const std::vector<double>& values) {
  const auto active = vad(reference, cfg);
  if (active.empty()) throw DataError("metrics: reference has no active frame");
  double acc = 0.0;
  for (std::size_t l : active) acc += values[l];
  return acc / static_cast<double>(active.size());
}

}  // namespace

MetricsConfig MetricsConfig::for_rate(int sample_rate_hz) {
  MetricsConfig cfg;
  const double k = static_cast<double>(cfg.fft_len);
  if (sample_rate_hz == 8000) {
    cfg.k_low = static_cast<std::size_t>(std::floor(k / 8000.0 * 50.0));
    cfg.k_high = static_cast<std::size_t>(std::floor(k / 8000.0 * 3400.0));
  } else if (sample_rate_hz == 16000) {
    cfg.k_low = static_cast<std::size_t>(std::floor(k / 16000.0 * 50.0));
    cfg.k_high = static_cast<std::size_t>(std::floor(k / 16000.0 * 7000.0));
  } else {
    throw ArgumentError("metrics: unsupported sample rate " +
                        std::to_string(sample_rate_hz));
  }
  return cfg;
}

void MetricsConfig::validate() const {
  if (!(k_low < k_high && k_high <= fft_len / 2)) {
    throw ArgumentError("metrics: need k_low < k_high <= K/2");
  }
  if (!(r_min_db < r_max_db)) throw ArgumentError("metrics: need R_min < R_max");
  if (!(vad_threshold >= 0.0)) throw ArgumentError("metrics: VAD threshold must be >= 0");
  if (!(frame_ms > 0.0)) throw ArgumentError("metrics: frame length must be positive");
}

std::size_t frame_length(const MetricsConfig& cfg, int sample_rate_hz) {
  const auto len = static_cast<std::size_t>(std::lround(cfg.frame_ms * sample_rate_hz / 1000.0));
  if (len < 2 || len % 2 != 0) throw ArgumentError("metrics: frame length must be even");
  if (len > cfg.fft_len) throw ArgumentError("metrics: frame longer than the FFT");
  return len;
}

std::size_t frame_count(std::size_t signal_length, std::size_t frame_len) {
  if (signal_length <= frame_len) return 1;
  return (signal_length - frame_len) / (frame_len / 2) + 1;
}

std::vector<std::size_t> vad(const AudioSignal& reference, const MetricsConfig& cfg) {
  cfg.validate();
  if (reference.empty()) throw ArgumentError("vad: empty signal");
  const std::size_t len = frame_length(cfg, reference.sample_rate_hz);
  const std::size_t count = frame_count(reference.size(), len);
  const double file_power = mean_square(reference.samples);
  std::vector<std::size_t> active;
  if (file_power <= 0.0) return active;
  for (std::size_t l = 0; l < count; ++l) {
    const double ratio = mean_square(frame_at(reference.samples, l, len)) / file_power;
    if (ratio > cfg.vad_threshold) active.push_back(l);
  }
  return active;
}

std::vector<double> lsd_frames(const AudioSignal& reference,
                               const AudioSignal& processed, const MetricsConfig& cfg) {
  check_pair(reference, processed);
  cfg.validate();
  const std::size_t len = frame_length(cfg, reference.sample_rate_hz);
  const std::size_t count = frame_count(reference.size(), len);
  const auto window = hann(len);
  const double bins = static_cast<double>(cfg.k_high - cfg.k_low + 1);
  std::vector<double> out(count);
  for (std::size_t l = 0; l < count; ++l) {
    const auto pr = power_spectrum(frame_at(reference.samples, l, len), window, cfg.fft_len);
    const auto pp = power_spectrum(frame_at(processed.samples, l, len), window, cfg.fft_len);
    double acc = 0.0;
    for (std::size_t k = cfg.k_low; k <= cfg.k_high; ++k) {
      const double d = 10.0 * std::log10(std::max(pr[k], kPowerFloor) /
                                         std::max(pp[k], kPowerFloor));
      acc += d * d;
    }
    out[l] = std::sqrt(acc / bins);
  }
  return out;
}

std::vector<double> ssdr_frames(const AudioSignal& reference,
                                const AudioSignal& processed, const MetricsConfig& cfg) {
  check_pair(reference, processed);
  cfg.validate();
  const std::size_t len = frame_length(cfg, reference.sample_rate_hz);
  const std::size_t count = frame_count(reference.size(), len);
  std::vector<double> out(count);
  for (std::size_t l = 0; l < count; ++l) {
    const auto s = frame_at(reference.samples, l, len);
    const auto p = frame_at(processed.samples, l, len);
    double signal = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      signal += s[i] * s[i];
      error += (p[i] - s[i]) * (p[i] - s[i]);
    }
    double db;
    if (signal <= 0.0) {
      db = cfg.r_min_db;
    } else if (error <= 0.0) {
      db = cfg.r_max_db;
    } else {
      db = 10.0 * std::log10(signal / error);
    }
    out[l] = std::clamp(db, cfg.r_min_db, cfg.r_max_db);
  }
  return out;
}

double lsd(const AudioSignal& reference, const AudioSignal& processed,
           const MetricsConfig& cfg) {
  return active_mean(reference, cfg, lsd_frames(reference, processed, cfg));
}

double ssdr_seg(const AudioSignal& reference, const AudioSignal& processed,
                const MetricsConfig& cfg) {
  return active_mean(reference, cfg, ssdr_frames(reference, processed, cfg));
}

double ssdr(const AudioSignal& reference, const AudioSignal& processed) {
  check_pair(reference, processed);
  double signal = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = processed.samples[i] - reference.samples[i];
    signal += reference.samples[i] * reference.samples[i];
    error += d * d;
  }
  if (error <= 0.0) return std::numeric_limits<double>::infinity();
  if (signal <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / error);
}

MetricsReport evaluate(const AudioSignal& reference, const AudioSignal& processed,
                       const MetricsConfig& cfg) {
  MetricsReport r;
  r.mean_lsd_db = lsd(reference, processed, cfg);
  r.ssdr_seg_db = ssdr_seg(reference, processed, cfg);
  r.ssdr_db = ssdr(reference, processed);
  r.active_frame_count = vad(reference, cfg).size();
  r.frame_count = frame_count(reference.size(), frame_length(cfg, reference.sample_rate_hz));
  return r;
}

}  // namespace cepnet::metrics
