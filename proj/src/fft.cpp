// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "cepnet/errors.hpp"

namespace cepnet::fft {
namespace {

enum class Kind { kForward, kInverse, kDct2, kDct3 };

// FFTW planning is not thread-safe; executing an existing plan on new
// arrays is. Plans are created once per (kind, size) and never destroyed.
fftw_plan get_plan(Kind kind, int n) {
  static std::mutex mutex;
  static std::map<std::pair<Kind, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find({kind, n});
  if (it != plans.end()) return it->second;

  constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  if (kind == Kind::kForward || kind == Kind::kInverse) {
    std::vector<Complex> buf(static_cast<std::size_t>(n));
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    plan = fftw_plan_dft_1d(n, p, p,
                            kind == Kind::kForward ? FFTW_FORWARD : FFTW_BACKWARD,
                            kFlags);
  } else {
    std::vector<double> in(static_cast<std::size_t>(n));
    std::vector<double> out(static_cast<std::size_t>(n));
    plan = fftw_plan_r2r_1d(n, in.data(), out.data(),
                            kind == Kind::kDct2 ? FFTW_REDFT10 : FFTW_REDFT01,
                            kFlags);
  }
  if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  plans.emplace(std::make_pair(kind, n), plan);
  return plan;
}

void run_complex(Kind kind, std::span<Complex> x) {
  if (x.empty()) return;
  auto* p = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(get_plan(kind, static_cast<int>(x.size())), p, p);
}

}  // namespace

std::vector<Complex> forward_real(std::span<const double> x, std::size_t n) {
  std::vector<Complex> out(n);
  const std::size_t m = std::min(n, x.size());
  for (std::size_t i = 0; i < m; ++i) out[i] = x[i];
  forward(out);
  return out;
}

void forward(std::span<Complex> x) { run_complex(Kind::kForward, x); }

void inverse(std::span<Complex> x) {
  run_complex(Kind::kInverse, x);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : x) v *= scale;
}

std::vector<double> dct2(std::span<const double> x) {
  std::vector<double> in(x.begin(), x.end());
  std::vector<double> out(x.size());
  if (x.empty()) return out;
  // REDFT10 computes 2 * sum_k x(k) cos(pi m (k + 0.5) / K).
  fftw_execute_r2r(get_plan(Kind::kDct2, static_cast<int>(x.size())),
                   in.data(), out.data());
  for (double& v : out) v *= 0.5;
  return out;
}

std::vector<double> idct2(std::span<const double> c) {
  std::vector<double> in(c.begin(), c.end());
  std::vector<double> out(c.size());
  if (c.empty()) return out;
  // REDFT01 computes c(0) + 2 sum_{m>=1} c(m) cos(pi m (k + 0.5) / K).
  fftw_execute_r2r(get_plan(Kind::kDct3, static_cast<int>(c.size())),
                   in.data(), out.data());
  const double scale = 1.0 / static_cast<double>(c.size());
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace cepnet::fft
