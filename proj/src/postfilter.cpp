// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/postfilter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "cepnet/errors.hpp"
#include "cepnet/fft.hpp"

namespace cepnet::postfilter {
namespace {

using Complex = std::complex<double>;

constexpr double kLogGammaMin = -0.5;  // overload, sigma ~ 3.2
constexpr double kLogGammaMax = 4.5;   // sigma ~ 3e-5
constexpr int kTablePoints = 201;

double normal_pdf(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

// P(a <= U < b) for a standard normal U, without cancellation in the tails.
double normal_mass(double a, double b) {
  constexpr double kRt2 = std::numbers::sqrt2;
  if (a >= 0.0) return 0.5 * (std::erfc(a / kRt2) - std::erfc(b / kRt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / kRt2) - std::erfc(-a / kRt2));
  return 1.0 - 0.5 * std::erfc(b / kRt2) - 0.5 * std::erfc(-a / kRt2);
}

// E[(U - q)^2 ; a <= U < b] for a standard normal U; a, b may be infinite.
double truncated_error(double a, double b, double q) {
  const double mass = normal_mass(a, b);
  const double pa = std::isinf(a) ? 0.0 : normal_pdf(a);
  const double pb = std::isinf(b) ? 0.0 : normal_pdf(b);
  const double apa = std::isinf(a) ? 0.0 : a * pa;
  const double bpb = std::isinf(b) ? 0.0 : b * pb;
  const double first = pa - pb;
  const double second = mass + apa - bpb;
  return std::max(0.0, second - 2.0 * q * first + q * q * mass);
}

// Expected quantization SNR for N(0, sigma^2) input, integrated exactly over
// the codec's decision intervals. Inputs beyond full scale saturate onto the
// outermost codewords.
double gaussian_snr(double sigma, g711::Law law) {
  double distortion = 0.0;
  for (int c = 0; c < 256; ++c) {
    const auto code = static_cast<std::uint8_t>(c);
    g711::QuantInterval iv = g711::quant_interval(code, law);
    double lo = iv.low <= -1.0 ? -INFINITY : iv.low / sigma;
    double hi = iv.high >= 1.0 ? INFINITY : iv.high / sigma;
    distortion += truncated_error(lo, hi, g711::decode(code, law) / sigma);
  }
  return 1.0 / std::max(distortion, 1e-300);
}

struct SnrTable {
  std::array<double, kTablePoints> snr_db{};
};

SnrTable build_table(g711::Law law) {
  SnrTable t;
  for (int i = 0; i < kTablePoints; ++i) {
    const double log_gamma =
        kLogGammaMin + (kLogGammaMax - kLogGammaMin) * i / (kTablePoints - 1);
    const double sigma = std::pow(10.0, -log_gamma);
    t.snr_db[i] = 10.0 * std::log10(gaussian_snr(sigma, law));
  }
  return t;
}

const SnrTable& table(g711::Law law) {
  static const SnrTable kALaw = build_table(g711::Law::kALaw);
  static const SnrTable kMuLaw = build_table(g711::Law::kMuLaw);
  return law == g711::Law::kALaw ? kALaw : kMuLaw;
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

void PostfilterConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("beta must lie in (0, 1)");
  if (!(gain_min > 0.0 && gain_min <= 1.0)) {
    throw ArgumentError("gain floor must lie in (0, 1]");
  }
  if (!(noise_scale >= 0.0)) throw ArgumentError("noise scale must be >= 0");
  if (hop == 0 || hop > frame_len || frame_len > fft_len) {
    throw ArgumentError("postfilter needs 0 < hop <= frame_len <= fft_len");
  }
  if (filter_len == 0 || filter_len > fft_len || fft_len - hop + 1 < filter_len) {
    throw ArgumentError("postfilter filter length does not fit the overlap-save block");
  }
}

double snr_q(double load_factor, g711::Law law) {
  if (!(load_factor > 0.0)) throw ArgumentError("load factor must be positive");
  const auto& t = table(law).snr_db;
  const double pos = (std::log10(load_factor) - kLogGammaMin) /
                     (kLogGammaMax - kLogGammaMin) * (kTablePoints - 1);
  double db;
  if (pos <= 0.0) {
    db = t.front();
  } else if (pos >= kTablePoints - 1) {
    db = t.back();
  } else {
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    db = t[i] + frac * (t[i + 1] - t[i]);
  }
  return std::pow(10.0, db / 10.0);
}

double estimate_noise_variance(std::span<const double> frame,
                               const PostfilterConfig& cfg) {
  if (frame.empty()) throw ArgumentError("estimate_noise_variance: empty frame");
  double power = 0.0;
  for (double s : frame) power += s * s;
  power /= static_cast<double>(frame.size());
  if (power <= 0.0) return 0.0;
  const double load = 1.0 / std::sqrt(power);
  return cfg.noise_scale * power / snr_q(load, cfg.law);
}

std::vector<double> wiener_gains(std::span<const Complex> spectrum,
                                 double noise_psd, PostfilterState& state,
                                 const PostfilterConfig& cfg) {
  const std::size_t k = spectrum.size();
  if (state.prev_filtered.size() != k) state.prev_filtered.assign(k, Complex{});
  state.gamma.assign(k, 0.0);
  state.xi1.assign(k, 0.0);
  state.gain1.assign(k, 1.0);
  state.xi2.assign(k, 0.0);
  std::vector<double> gain2(k, 1.0);

  if (noise_psd <= 0.0) {
    std::copy(spectrum.begin(), spectrum.end(), state.prev_filtered.begin());
    state.prev_noise_psd = 0.0;
    state.first_frame = false;
    return gain2;
  }

  // On the first frame the previous noise power equals the current one and
  // the previous filtered spectrum is zero.
  const double prev_noise =
      state.first_frame ? noise_psd : state.prev_noise_psd;
  for (std::size_t i = 0; i < k; ++i) {
    const double power = std::norm(spectrum[i]);
    const double gamma = power / noise_psd;
    const double previous =
        prev_noise > 0.0 ? std::norm(state.prev_filtered[i]) / prev_noise : 0.0;
    const double xi1 = cfg.beta * previous + (1.0 - cfg.beta) * std::max(gamma - 1.0, 0.0);
    const double g1 = xi1 / (1.0 + xi1);
    const double xi2 = g1 * g1 * power / noise_psd;
    gain2[i] = std::max(xi2 / (1.0 + xi2), cfg.gain_min);

    state.gamma[i] = gamma;
    state.xi1[i] = xi1;
    state.gain1[i] = g1;
    state.xi2[i] = xi2;
    state.prev_filtered[i] = g1 * spectrum[i];
  }
  state.prev_noise_psd = noise_psd;
  state.first_frame = false;
  return gain2;
}

AudioSignal apply(const AudioSignal& signal, const PostfilterConfig& cfg,
                  std::span<const std::uint8_t> codewords) {
  cfg.validate();
  if (signal.sample_rate_hz != 8000) {
    throw ArgumentError("postfilter expects 8 kHz G.711 speech, got " +
                        std::to_string(signal.sample_rate_hz) + " Hz");
  }
  if (!codewords.empty() && codewords.size() != signal.samples.size()) {
    throw ArgumentError("postfilter: codeword count does not match signal length");
  }

  const std::vector<double>& x = signal.samples;
  const std::size_t n = x.size();
  const std::vector<double> window = periodic_hann(cfg.frame_len);
  double window_energy = 0.0;
  for (double w : window) window_energy += w * w;

  auto sample = [&](std::ptrdiff_t i) {
    return i < 0 || static_cast<std::size_t>(i) >= n ? 0.0 : x[static_cast<std::size_t>(i)];
  };

  AudioSignal out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.samples.assign(n, 0.0);
  PostfilterState state;
  std::vector<double> frame(cfg.frame_len);
  std::vector<double> windowed(cfg.frame_len);
  std::vector<Complex> buffer(cfg.fft_len);
  std::vector<Complex> response(cfg.fft_len);
  const std::size_t half = cfg.filter_len / 2;

  for (std::size_t start = 0; start < n; start += cfg.hop) {
    const auto end = static_cast<std::ptrdiff_t>(start + cfg.hop);
    // Causal analysis window ending with the current block.
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      frame[i] = sample(end - static_cast<std::ptrdiff_t>(cfg.frame_len) +
                        static_cast<std::ptrdiff_t>(i));
      windowed[i] = frame[i] * window[i];
    }
    const double noise_var = estimate_noise_variance(frame, cfg);
    const std::vector<Complex> spectrum = fft::forward_real(windowed, cfg.fft_len);
    const std::vector<double> gains =
        wiener_gains(spectrum, noise_var * window_energy, state, cfg);

    // Zero-phase response, shifted by half the filter length and truncated.
    for (std::size_t i = 0; i < cfg.fft_len; ++i) buffer[i] = gains[i];
    fft::inverse(buffer);
    std::fill(response.begin(), response.end(), Complex{});
    for (std::size_t j = 0; j < cfg.filter_len; ++j) {
      const std::size_t src = (j + cfg.fft_len - half) % cfg.fft_len;
      response[j] = buffer[src].real();
    }
    fft::forward(response);

    // Overlap-save: the last `hop` outputs of the circular convolution over
    // the newest fft_len inputs are free of wrap-around.
    for (std::size_t i = 0; i < cfg.fft_len; ++i) {
      buffer[i] = sample(end - static_cast<std::ptrdiff_t>(cfg.fft_len) +
                         static_cast<std::ptrdiff_t>(i));
    }
    fft::forward(buffer);
    for (std::size_t i = 0; i < cfg.fft_len; ++i) buffer[i] *= response[i];
    fft::inverse(buffer);
    for (std::size_t i = 0; i < cfg.hop && start + i < n; ++i) {
      out.samples[start + i] = buffer[cfg.fft_len - cfg.hop + i].real();
    }
  }

  if (!codewords.empty()) {
    const std::size_t d = cfg.delay();
    for (std::size_t i = d; i < n; ++i) {
      const g711::QuantInterval q = g711::quant_interval(codewords[i - d], cfg.law);
      const double high = std::min(q.high, 32767.0 / 32768.0);
      out.samples[i] = std::clamp(out.samples[i], q.low, high);
    }
  }
  clamp_to_pcm_range(out.samples);
  return out;
}

}  // namespace cepnet::postfilter
