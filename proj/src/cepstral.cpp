// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/cepstral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cepnet/errors.hpp"
#include "cepnet/fft.hpp"

namespace cepnet::cepstral {

CepstralConfig config_for_frame_length(std::size_t processing_len) {
  CepstralConfig cfg;
  cfg.fft_len = 2 * processing_len;
  return cfg;
}

std::vector<double> combine(const CepstralFrame& frame) {
  std::vector<double> c;
  c.reserve(frame.c_env.size() + frame.c_res.size());
  c.insert(c.end(), frame.c_env.begin(), frame.c_env.end());
  c.insert(c.end(), frame.c_res.begin(), frame.c_res.end());
  return c;
}

CepstralFrame analyze_frame(std::span<const double> frame,
                            const CepstralConfig& cfg) {
  const std::size_t k = cfg.fft_len;
  if (frame.size() > k) {
    throw ArgumentError("analyze_frame: frame longer than FFT length");
  }
  for (double v : frame) {
    if (!std::isfinite(v)) throw ArgumentError("analyze_frame: non-finite sample");
  }
  const std::vector<fft::Complex> spectrum = fft::forward_real(frame, k);

  CepstralFrame out;
  out.phase.resize(k);
  std::vector<double> log_mag(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.phase[i] = std::arg(spectrum[i]);
    log_mag[i] = std::log10(std::max(std::abs(spectrum[i]), cfg.log_floor));
  }
  const std::vector<double> c = fft::dct2(log_mag);
  const auto split = static_cast<std::ptrdiff_t>(cfg.env_count());
  out.c_env.assign(c.begin(), c.begin() + split);
  out.c_res.assign(c.begin() + split, c.end());
  return out;
}

std::vector<double> synthesize_frame(const CepstralFrame& frame,
                                     const CepstralConfig& cfg) {
  const std::size_t k = cfg.fft_len;
  if (frame.c_env.size() + frame.c_res.size() != k || frame.phase.size() != k) {
    throw ArgumentError("synthesize_frame: cepstral frame does not match K=" +
                        std::to_string(k));
  }
  const std::vector<double> log_mag = fft::idct2(combine(frame));
  std::vector<fft::Complex> spectrum(k);
  for (std::size_t i = 0; i < k; ++i) {
    spectrum[i] = std::polar(std::pow(10.0, log_mag[i]), frame.phase[i]);
  }
  fft::inverse(spectrum);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = spectrum[i].real();
  return out;
}

std::vector<double> c0_floor(std::span<const double> c_env,
                             const CepstralConfig& cfg) {
  std::vector<double> out(c_env.begin(), c_env.end());
  if (!out.empty() && out[0] < cfg.c0_threshold) out[0] -= cfg.c0_offset;
  return out;
}

std::vector<double> dct2(std::span<const double> x) {
  if (x.empty()) throw ArgumentError("dct2: empty input");
  return fft::dct2(x);
}

std::vector<double> idct2(std::span<const double> c) {
  if (c.empty()) throw ArgumentError("idct2: empty input");
  return fft::idct2(c);
}

}  // namespace cepnet::cepstral
