// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_CEPSTRAL_HPP_
#define CEPNET_CEPSTRAL_HPP_

#include <span>
#include <vector>

namespace cepnet::cepstral {

struct CepstralConfig {
  std::size_t fft_len = 512;  // K, a power of two
  double log_floor = 1e-12;   // magnitude floor before log10
  double c0_threshold = -1650.0;
  double c0_offset = 1000.0;

  // Number of low-quefrency (envelope) coefficients: K / 16.
  std::size_t env_count() const { return fft_len / 16; }
};

// K = 2 * processing length (e.g. 256-sample frames -> K = 512).
CepstralConfig config_for_frame_length(std::size_t processing_len);

struct CepstralFrame {
  std::vector<double> c_env;  // |M_env| envelope coefficients
  std::vector<double> c_res;  // remaining K - |M_env| coefficients
  std::vector<double> phase;  // K bin phases in (-pi, pi]
};

// Full cepstrum c = c_env followed by c_res.
std::vector<double> combine(const CepstralFrame& frame);

// FFT -> log10 |.| -> DCT-II -> split into envelope and residual parts.
CepstralFrame analyze_frame(std::span<const double> frame,
                            const CepstralConfig& cfg);

// Recombine -> IDCT-II -> 10^(.) e^{j phase} -> IFFT; returns the real part
// (K samples).
std::vector<double> synthesize_frame(const CepstralFrame& frame,
                                     const CepstralConfig& cfg);

// Pushes a low c0 further down: c0 < threshold  ->  c0 - offset.
std::vector<double> c0_floor(std::span<const double> c_env,
                             const CepstralConfig& cfg);

// DCT-II / inverse pair used for the cepstrum (unnormalized forward,
// 1/K and factor-2 inverse). Throws ArgumentError on empty input.
std::vector<double> dct2(std::span<const double> x);
std::vector<double> idct2(std::span<const double> c);

}  // namespace cepnet::cepstral

#endif  // CEPNET_CEPSTRAL_HPP_
