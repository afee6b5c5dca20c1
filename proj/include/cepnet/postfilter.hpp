// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_POSTFILTER_HPP_
#define CEPNET_POSTFILTER_HPP_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "cepnet/audio_io.hpp"
#include "cepnet/g711.hpp"

namespace cepnet::postfilter {

// Wiener postfilter for G.711 quantization noise. Every 2 ms block is
// analyzed with a causal 4 ms periodic Hann window (64-point FFT) and
// filtered with a 32-tap linear-phase FIR by overlap-save, so the
// algorithmic delay is the filter group delay of 16 samples (2 ms).
struct PostfilterConfig {
  std::size_t frame_len = 32;   // analysis window, samples
  std::size_t hop = 16;         // block size, samples
  std::size_t fft_len = 64;
  std::size_t filter_len = 32;  // FIR taps
  double beta = 0.98;           // decision-directed smoothing
  double gain_min = 0.31622776601683794;  // -10 dB
  double noise_scale = 1.0;     // multiplier on the noise variance estimate
  g711::Law law = g711::Law::kALaw;

  void validate() const;
  std::size_t delay() const { return filter_len / 2; }
};

// Linear signal-to-quantization-noise ratio of the shipped codec for a
// zero-mean Gaussian input with load factor gamma = 1 / sigma (overload at
// |x| = 1). Table-interpolated in log(gamma); clamped outside the table.
double snr_q(double load_factor, g711::Law law);

// Mean square of the frame divided by snr_q(1 / rms). Zero frames give 0.
double estimate_noise_variance(std::span<const double> frame,
                               const PostfilterConfig& cfg);

struct PostfilterState {
  std::vector<std::complex<double>> prev_filtered;  // S1(l-1, k)
  double prev_noise_psd = 0.0;                       // spectral noise power, l-1
  bool first_frame = true;

  // Per-frame quantities of the most recent call.
  std::vector<double> gamma;
  std::vector<double> xi1;
  std::vector<double> gain1;
  std::vector<double> xi2;
};

// Two-step decision-directed Wiener gains for one spectrum. `noise_psd` is
// the expected |N(k)|^2 (noise variance times the window energy). A zero
// noise power yields unit gains. Updates `state` with S1 = G1 * S.
std::vector<double> wiener_gains(std::span<const std::complex<double>> spectrum,
                                 double noise_psd, PostfilterState& state,
                                 const PostfilterConfig& cfg);

// Filters G.711-decoded 8 kHz speech. The output has the input's length and
// lags it by cfg.delay() samples. With `codewords`, every output sample is
// additionally constrained to the quantization interval of the codeword it
// was derived from.
AudioSignal apply(const AudioSignal& signal, const PostfilterConfig& cfg,
                  std::span<const std::uint8_t> codewords = {});

}  // namespace cepnet::postfilter

#endif  // CEPNET_POSTFILTER_HPP_
