// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_CNN_HPP_
#define CEPNET_CNN_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cepnet::cnn {

inline constexpr std::size_t kNumLayers = 10;

struct CnnConfig {
  std::size_t input_len = 32;     // L, divisible by 4
  std::size_t kernel_len = 6;     // N
  std::size_t feature_maps = 22;  // F
  double leaky_slope = 0.3;
  std::uint64_t seed = 1;

  // Throws ArgumentError when the topology cannot be built.
  void validate() const;
};

struct LayerShape {
  std::size_t out_maps = 0;
  std::size_t in_maps = 0;
};

// (out, in) per convolution, encoder first:
// (F,1) (F,F) | pool | (2F,F) (2F,2F) | pool | (F,2F) | up | (2F,F) (2F,2F) |
// up | (F,2F) (F,F) (1,F)
std::array<LayerShape, kNumLayers> layer_shapes(const CnnConfig& cfg);

// Closed-form trainable parameter count: sum of out*N*in + out.
std::uint64_t param_count(const CnnConfig& cfg);

// Convolution multiply-accumulates per frame, 10.5*N*L*F^2 + 2*N*L*F.
std::uint64_t macs_per_frame(const CnnConfig& cfg);

// MACs per frame times frame rate, in millions.
double mips(const CnnConfig& cfg, double frames_per_second);

// All trainable parameters live in one flat vector; each layer owns a kernel
// block (out x N x in, row-major) followed by its out biases.
struct LayerSlot {
  LayerShape shape;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
};

struct CnnModel {
  CnnConfig config;
  std::array<LayerSlot, kNumLayers> slots{};
  std::vector<double> params;
  std::vector<double> norm_mean;  // length L
  std::vector<double> norm_std;   // length L, strictly positive

  // Zero parameters, identity normalization.
  static CnnModel zeros(const CnnConfig& cfg);
  // Glorot-uniform kernels from cfg.seed, zero biases, identity normalization.
  static CnnModel initialize(const CnnConfig& cfg);

  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;

  // Rounds every stored value to float32, the on-disk precision.
  void round_to_storage();

  // Throws ModelError on inconsistent sizes or non-finite values.
  void validate() const;
};

bool operator==(const CnnModel& a, const CnnModel& b);

// Layer inputs and pre-activations of one forward pass, kept for backward.
class Workspace {
 public:
  explicit Workspace(const CnnConfig& cfg);

 private:
  friend std::span<const double> forward(const CnnModel&, std::span<const double>,
                                         Workspace&);
  friend double accumulate_gradients(const CnnModel&, std::span<const double>,
                                     std::span<const double>, Workspace&,
                                     std::span<double>);
  std::array<std::vector<double>, kNumLayers> input_;  // zero-padded layer inputs
  std::array<std::vector<double>, kNumLayers> pre_;    // conv outputs (+ skip)
  std::vector<double> skip_a_;   // conv2 activation, L x F
  std::vector<double> skip_b_;   // conv4 activation, L/2 x 2F
  std::vector<std::uint8_t> pool1_arg_;
  std::vector<std::uint8_t> pool2_arg_;
  std::vector<double> output_;
  // backward scratch
  std::array<std::vector<double>, kNumLayers> d_input_;
  std::vector<double> d_pre_;
  std::vector<double> d_skip_a_;
  std::vector<double> d_skip_b_;
};

// Normalizes x with the model statistics and runs the encoder-decoder.
// The returned view stays valid until the workspace is reused.
std::span<const double> forward(const CnnModel& model, std::span<const double> x,
                                Workspace& ws);
std::vector<double> forward(const CnnModel& model, std::span<const double> x);

struct Gradients {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as CnnModel::params
};

// loss = mean((forward(x) - target)^2) and its exact gradient.
Gradients backward(const CnnModel& model, std::span<const double> x,
                   std::span<const double> target);

// Adds d loss / d params into `grad` and returns the loss.
double accumulate_gradients(const CnnModel& model, std::span<const double> x,
                            std::span<const double> target, Workspace& ws,
                            std::span<double> grad);

struct AdamState {
  std::uint64_t step = 0;
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<double> m;
  std::vector<double> v;

  static AdamState for_model(const CnnModel& model, double lr);
};

// Bias-corrected Adam update; increments state.step.
void adam_step(AdamState& state, CnnModel& model, std::span<const double> grad);

// Model file: "CPN1", u32 header length, JSON header, float32 payload.
void save(const CnnModel& model, const std::filesystem::path& path);
CnnModel load(const std::filesystem::path& path);

}  // namespace cepnet::cnn

#endif  // CEPNET_CNN_HPP_
