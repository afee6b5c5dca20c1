// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_FFT_HPP_
#define CEPNET_FFT_HPP_

#include <complex>
#include <span>
#include <vector>

namespace cepnet::fft {

using Complex = std::complex<double>;

// Forward DFT of a real sequence zero-padded (or truncated) to n points.
// Returns all n bins.
std::vector<Complex> forward_real(std::span<const double> x, std::size_t n);

// Unnormalized forward / normalized (1/n) inverse complex DFT, in place.
void forward(std::span<Complex> x);
void inverse(std::span<Complex> x);

// c(m) = sum_k x(k) cos(pi m (k + 0.5) / K).
std::vector<double> dct2(std::span<const double> x);

// x(k) = (1/K) [c(0) + 2 sum_{m>=1} c(m) cos(pi m (k + 0.5) / K)]; exact
// inverse of dct2.
std::vector<double> idct2(std::span<const double> c);

}  // namespace cepnet::fft

#endif  // CEPNET_FFT_HPP_
