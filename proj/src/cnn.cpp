// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include "cepnet/errors.hpp"
#include "json.hpp"

namespace cepnet::cnn {
namespace {

// Layer lengths relative to L: full, half, quarter.
constexpr std::array<int, kNumLayers> kLengthDivisor = {1, 1, 2, 2, 4, 2, 2, 1, 1, 1};

std::size_t layer_len(const CnnConfig& cfg, std::size_t layer) {
  return cfg.input_len / static_cast<std::size_t>(kLengthDivisor[layer]);
}

std::size_t pad_left(std::size_t kernel) { return (kernel - 1) / 2; }

// Four interleaved partial sums: lets the compiler vectorize without
// reassociating floating point on its own, so results stay reproducible.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Time-major "same" convolution. `xpad` holds (len + N - 1) rows of `in`
// values, so the receptive field of output t is one contiguous block that
// lines up with the out x N x in kernel layout.
// AVX2 clone picked at load time where available; no FMA, so both clones
// round identically.
__attribute__((target_clones("avx2", "default")))
void conv_forward(const double* w, const double* b, const LayerShape& s,
                  std::size_t kernel, std::size_t len, const double* xpad,
                  double* y) {
  const std::size_t block = kernel * s.in_maps;
  for (std::size_t t = 0; t < len; ++t) {
    const double* window = xpad + t * s.in_maps;
    double* row = y + t * s.out_maps;
    for (std::size_t o = 0; o < s.out_maps; ++o) {
      row[o] = b[o] + dot(w + o * block, window, block);
    }
  }
}

__attribute__((target_clones("avx2", "default")))
void conv_backward(const double* w, const LayerShape& s, std::size_t kernel,
                   std::size_t len, const double* xpad, const double* dy,
                   double* dw, double* db, double* dxpad) {
  const std::size_t block = kernel * s.in_maps;
  for (std::size_t t = 0; t < len; ++t) {
    const double* window = xpad + t * s.in_maps;
    const double* drow = dy + t * s.out_maps;
    for (std::size_t o = 0; o < s.out_maps; ++o) {
      const double g = drow[o];
      if (g == 0.0) continue;
      db[o] += g;
      axpy(g, window, dw + o * block, block);
      if (dxpad != nullptr) axpy(g, w + o * block, dxpad + t * s.in_maps, block);
    }
  }
}

double leaky(double z, double slope) { return z > 0.0 ? z : slope * z; }

std::size_t padded_size(std::size_t len, std::size_t kernel, std::size_t maps) {
  return (len + kernel - 1) * maps;
}

}  // namespace

void CnnConfig::validate() const {
  if (input_len == 0 || input_len % 4 != 0) {
    throw ArgumentError("CNN input length must be a positive multiple of 4, got " +
                        std::to_string(input_len));
  }
  if (kernel_len < 1) throw ArgumentError("CNN kernel length must be >= 1");
  if (feature_maps < 1) throw ArgumentError("CNN feature maps must be >= 1");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
    throw ArgumentError("leaky ReLU slope must lie in (0, 1)");
  }
}

std::array<LayerShape, kNumLayers> layer_shapes(const CnnConfig& cfg) {
  const std::size_t f = cfg.feature_maps;
  return {{{f, 1},
           {f, f},
           {2 * f, f},
           {2 * f, 2 * f},
           {f, 2 * f},
           {2 * f, f},
           {2 * f, 2 * f},
           {f, 2 * f},
           {f, f},
           {1, f}}};
}

std::uint64_t param_count(const CnnConfig& cfg) {
  std::uint64_t total = 0;
  for (const LayerShape& s : layer_shapes(cfg)) {
    total += s.out_maps * cfg.kernel_len * s.in_maps + s.out_maps;
  }
  return total;
}

std::uint64_t macs_per_frame(const CnnConfig& cfg) {
  const double n = static_cast<double>(cfg.kernel_len);
  const double l = static_cast<double>(cfg.input_len);
  const double f = static_cast<double>(cfg.feature_maps);
  return static_cast<std::uint64_t>(std::llround(10.5 * n * l * f * f + 2.0 * n * l * f));
}

double mips(const CnnConfig& cfg, double frames_per_second) {
  return static_cast<double>(macs_per_frame(cfg)) * frames_per_second / 1e6;
}

CnnModel CnnModel::zeros(const CnnConfig& cfg) {
  cfg.validate();
  CnnModel m;
  m.config = cfg;
  const auto shapes = layer_shapes(cfg);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < kNumLayers; ++i) {
    m.slots[i].shape = shapes[i];
    m.slots[i].weight_offset = offset;
    offset += shapes[i].out_maps * cfg.kernel_len * shapes[i].in_maps;
    m.slots[i].bias_offset = offset;
    offset += shapes[i].out_maps;
  }
  m.params.assign(offset, 0.0);
  m.norm_mean.assign(cfg.input_len, 0.0);
  m.norm_std.assign(cfg.input_len, 1.0);
  return m;
}

CnnModel CnnModel::initialize(const CnnConfig& cfg) {
  CnnModel m = zeros(cfg);
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < kNumLayers; ++i) {
    const LayerShape& s = m.slots[i].shape;
    const double fan_in = static_cast<double>(cfg.kernel_len * s.in_maps);
    const double fan_out = static_cast<double>(cfg.kernel_len * s.out_maps);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    // 53-bit uniform straight from the engine: same weights on any stdlib
    for (double& w : m.weights(i)) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      w = limit * (2.0 * u - 1.0);
    }
  }
  m.round_to_storage();
  return m;
}

std::span<double> CnnModel::weights(std::size_t layer) {
  const LayerSlot& s = slots[layer];
  return {params.data() + s.weight_offset, s.bias_offset - s.weight_offset};
}

std::span<const double> CnnModel::weights(std::size_t layer) const {
  const LayerSlot& s = slots[layer];
  return {params.data() + s.weight_offset, s.bias_offset - s.weight_offset};
}

std::span<double> CnnModel::bias(std::size_t layer) {
  const LayerSlot& s = slots[layer];
  return {params.data() + s.bias_offset, s.shape.out_maps};
}

std::span<const double> CnnModel::bias(std::size_t layer) const {
  const LayerSlot& s = slots[layer];
  return {params.data() + s.bias_offset, s.shape.out_maps};
}

void CnnModel::round_to_storage() {
  auto round = [](std::vector<double>& v) {
    for (double& x : v) x = static_cast<double>(static_cast<float>(x));
  };
  round(params);
  round(norm_mean);
  round(norm_std);
}

void CnnModel::validate() const {
  try {
    config.validate();
  } catch (const ArgumentError& e) {
    throw ModelError(e.what());
  }
  if (params.size() != param_count(config)) {
    throw ModelError("parameter vector has " + std::to_string(params.size()) +
                     " entries, topology needs " +
                     std::to_string(param_count(config)));
  }
  const auto shapes = layer_shapes(config);
  for (std::size_t i = 0; i < kNumLayers; ++i) {
    if (slots[i].shape.out_maps != shapes[i].out_maps ||
        slots[i].shape.in_maps != shapes[i].in_maps) {
      throw ModelError("layer " + std::to_string(i + 1) + " has wrong shape");
    }
  }
  if (norm_mean.size() != config.input_len || norm_std.size() != config.input_len) {
    throw ModelError("normalization statistics do not match input length");
  }
  for (double v : params) {
    if (!std::isfinite(v)) throw ModelError("non-finite model parameter");
  }
  for (std::size_t i = 0; i < config.input_len; ++i) {
    if (!std::isfinite(norm_mean[i]) || !std::isfinite(norm_std[i]) ||
        !(norm_std[i] > 0.0)) {
      throw ModelError("invalid normalization statistics");
    }
  }
}

bool operator==(const CnnModel& a, const CnnModel& b) {
  return a.config.input_len == b.config.input_len &&
         a.config.kernel_len == b.config.kernel_len &&
         a.config.feature_maps == b.config.feature_maps &&
         a.config.leaky_slope == b.config.leaky_slope &&
         a.config.seed == b.config.seed && a.params == b.params &&
         a.norm_mean == b.norm_mean && a.norm_std == b.norm_std;
}

Workspace::Workspace(const CnnConfig& cfg) {
  cfg.validate();
  const auto shapes = layer_shapes(cfg);
  for (std::size_t i = 0; i < kNumLayers; ++i) {
    const std::size_t len = layer_len(cfg, i);
    input_[i].assign(padded_size(len, cfg.kernel_len, shapes[i].in_maps), 0.0);
    d_input_[i].assign(input_[i].size(), 0.0);
    pre_[i].assign(len * shapes[i].out_maps, 0.0);
  }
  skip_a_.assign(cfg.input_len * cfg.feature_maps, 0.0);
  skip_b_.assign(cfg.input_len / 2 * 2 * cfg.feature_maps, 0.0);
  d_skip_a_.assign(skip_a_.size(), 0.0);
  d_skip_b_.assign(skip_b_.size(), 0.0);
  pool1_arg_.assign(cfg.input_len / 2 * cfg.feature_maps, 0);
  pool2_arg_.assign(cfg.input_len / 4 * 2 * cfg.feature_maps, 0);
  output_.assign(cfg.input_len, 0.0);
  d_pre_.assign(cfg.input_len * 2 * cfg.feature_maps, 0.0);
}

std::span<const double> forward(const CnnModel& model, std::span<const double> x,
                                Workspace& ws) {
  const CnnConfig& cfg = model.config;
  const std::size_t L = cfg.input_len;
  const std::size_t N = cfg.kernel_len;
  const std::size_t F = cfg.feature_maps;
  const std::size_t pad = pad_left(N);
  const double slope = cfg.leaky_slope;
  if (x.size() != L) {
    throw ArgumentError("forward: input length " + std::to_string(x.size()) +
                        " != L=" + std::to_string(L));
  }
  if (ws.output_.size() != L || ws.skip_a_.size() != L * F ||
      ws.input_[0].size() != padded_size(L, N, 1)) {
    throw ArgumentError("forward: workspace built for another topology");
  }

  auto conv = [&](std::size_t layer) {
    const auto w = model.weights(layer);
    const auto b = model.bias(layer);
    conv_forward(w.data(), b.data(), model.slots[layer].shape, N,
                 layer_len(cfg, layer), ws.input_[layer].data(),
                 ws.pre_[layer].data());
  };
  // Writes activation(pre_[layer]) into the interior of input_[next].
  auto activate_into = [&](std::size_t layer, std::size_t next) {
    const auto& z = ws.pre_[layer];
    const std::size_t maps = model.slots[layer].shape.out_maps;
    double* dst = ws.input_[next].data() + pad * maps;
    for (std::size_t i = 0; i < z.size(); ++i) dst[i] = leaky(z[i], slope);
  };
  auto activate_to = [&](std::size_t layer, std::vector<double>& dst) {
    const auto& z = ws.pre_[layer];
    for (std::size_t i = 0; i < z.size(); ++i) dst[i] = leaky(z[i], slope);
  };
  // 2x1 max pooling per map; ties go to the earlier sample.
  auto pool_into = [&](const std::vector<double>& src, std::size_t len,
                       std::size_t maps, std::size_t next,
                       std::vector<std::uint8_t>& arg) {
    double* dst = ws.input_[next].data() + pad * maps;
    for (std::size_t t = 0; t < len / 2; ++t) {
      for (std::size_t c = 0; c < maps; ++c) {
        const double a = src[(2 * t) * maps + c];
        const double b = src[(2 * t + 1) * maps + c];
        const bool second = b > a;
        arg[t * maps + c] = second ? 1 : 0;
        dst[t * maps + c] = second ? b : a;
      }
    }
  };
  auto upsample_into = [&](const double* src, std::size_t len, std::size_t maps,
                           std::size_t next) {
    double* dst = ws.input_[next].data() + pad * maps;
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t c = 0; c < maps; ++c) {
        dst[(2 * t) * maps + c] = src[t * maps + c];
        dst[(2 * t + 1) * maps + c] = src[t * maps + c];
      }
    }
  };

  double* in0 = ws.input_[0].data() + pad;
  for (std::size_t t = 0; t < L; ++t) {
    if (!std::isfinite(x[t])) throw ArgumentError("forward: non-finite input");
    in0[t] = (x[t] - model.norm_mean[t]) / model.norm_std[t];
  }
  conv(0);
  activate_into(0, 1);
  conv(1);
  activate_to(1, ws.skip_a_);
  pool_into(ws.skip_a_, L, F, 2, ws.pool1_arg_);
  conv(2);
  activate_into(2, 3);
  conv(3);
  activate_to(3, ws.skip_b_);
  pool_into(ws.skip_b_, L / 2, 2 * F, 4, ws.pool2_arg_);
  conv(4);
  {
    std::vector<double> a5(ws.pre_[4].size());
    activate_to(4, a5);
    upsample_into(a5.data(), L / 4, F, 5);
  }
  conv(5);
  activate_into(5, 6);
  conv(6);
  for (std::size_t i = 0; i < ws.pre_[6].size(); ++i) ws.pre_[6][i] += ws.skip_b_[i];
  {
    std::vector<double> a7(ws.pre_[6].size());
    activate_to(6, a7);
    upsample_into(a7.data(), L / 2, 2 * F, 7);
  }
  conv(7);
  activate_into(7, 8);
  conv(8);
  for (std::size_t i = 0; i < ws.pre_[8].size(); ++i) ws.pre_[8][i] += ws.skip_a_[i];
  activate_into(8, 9);
  conv(9);
  std::copy(ws.pre_[9].begin(), ws.pre_[9].end(), ws.output_.begin());
  for (double v : ws.output_) {
    if (!std::isfinite(v)) throw ModelError("forward: non-finite output, model is corrupt");
  }
  return ws.output_;
}

std::vector<double> forward(const CnnModel& model, std::span<const double> x) {
  model.validate();
  Workspace ws(model.config);
  const auto y = forward(model, x, ws);
  return {y.begin(), y.end()};
}

double accumulate_gradients(const CnnModel& model, std::span<const double> x,
                            std::span<const double> target, Workspace& ws,
                            std::span<double> grad) {
  const CnnConfig& cfg = model.config;
  const std::size_t L = cfg.input_len;
  const std::size_t N = cfg.kernel_len;
  const std::size_t F = cfg.feature_maps;
  const std::size_t pad = pad_left(N);
  const double slope = cfg.leaky_slope;
  if (target.size() != L) throw ArgumentError("backward: target length != L");
  if (grad.size() != model.params.size()) {
    throw ArgumentError("backward: gradient buffer has wrong size");
  }

  const auto y = forward(model, x, ws);
  double loss = 0.0;
  std::vector<double>& dz = ws.d_pre_;
  dz.resize(L);
  for (std::size_t t = 0; t < L; ++t) {
    const double r = y[t] - target[t];
    loss += r * r;
    dz[t] = 2.0 * r / static_cast<double>(L);
  }
  loss /= static_cast<double>(L);

  // Backpropagates dz through conv `layer`; fills d_input_[layer] if needed.
  auto conv_back = [&](std::size_t layer, bool need_input_grad) {
    const LayerSlot& slot = model.slots[layer];
    auto& dx = ws.d_input_[layer];
    if (need_input_grad) std::fill(dx.begin(), dx.end(), 0.0);
    conv_backward(model.params.data() + slot.weight_offset, slot.shape, N,
                  layer_len(cfg, layer), ws.input_[layer].data(), dz.data(),
                  grad.data() + slot.weight_offset, grad.data() + slot.bias_offset,
                  need_input_grad ? dx.data() : nullptr);
  };
  // Gradient w.r.t. the unpadded input of `layer`.
  auto d_in = [&](std::size_t layer) {
    const std::size_t maps = model.slots[layer].shape.in_maps;
    return ws.d_input_[layer].data() + pad * maps;
  };
  // dz <- upstream * leaky'(pre_[layer])
  auto through_activation = [&](std::size_t layer, const double* upstream) {
    const auto& z = ws.pre_[layer];
    dz.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      dz[i] = z[i] > 0.0 ? upstream[i] : slope * upstream[i];
    }
  };
  auto upsample_back = [](const double* d_up, std::size_t len, std::size_t maps,
                          std::vector<double>& out) {
    out.assign(len * maps, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t c = 0; c < maps; ++c) {
        out[t * maps + c] = d_up[(2 * t) * maps + c] + d_up[(2 * t + 1) * maps + c];
      }
    }
  };
  auto pool_back = [](const double* d_pooled, std::size_t len, std::size_t maps,
                      const std::vector<std::uint8_t>& arg, std::vector<double>& out) {
    for (std::size_t t = 0; t < len / 2; ++t) {
      for (std::size_t c = 0; c < maps; ++c) {
        out[(2 * t + arg[t * maps + c]) * maps + c] += d_pooled[t * maps + c];
      }
    }
  };

  std::vector<double> tmp;
  conv_back(9, true);                      // conv10, linear
  through_activation(8, d_in(9));          // conv9
  ws.d_skip_a_.assign(dz.begin(), dz.end());
  conv_back(8, true);
  through_activation(7, d_in(8));          // conv8
  conv_back(7, true);
  upsample_back(d_in(7), L / 2, 2 * F, tmp);
  through_activation(6, tmp.data());       // conv7
  ws.d_skip_b_.assign(dz.begin(), dz.end());
  conv_back(6, true);
  through_activation(5, d_in(6));          // conv6
  conv_back(5, true);
  upsample_back(d_in(5), L / 4, F, tmp);
  through_activation(4, tmp.data());       // conv5
  conv_back(4, true);
  pool_back(d_in(4), L / 2, 2 * F, ws.pool2_arg_, ws.d_skip_b_);
  through_activation(3, ws.d_skip_b_.data());  // conv4
  conv_back(3, true);
  through_activation(2, d_in(3));          // conv3
  conv_back(2, true);
  pool_back(d_in(2), L, F, ws.pool1_arg_, ws.d_skip_a_);
  through_activation(1, ws.d_skip_a_.data());  // conv2
  conv_back(1, true);
  through_activation(0, d_in(1));          // conv1
  conv_back(0, false);
  return loss;
}

Gradients backward(const CnnModel& model, std::span<const double> x,
                   std::span<const double> target) {
  Workspace ws(model.config);
  Gradients g;
  g.grad.assign(model.params.size(), 0.0);
  g.loss = accumulate_gradients(model, x, target, ws, g.grad);
  return g;
}

AdamState AdamState::for_model(const CnnModel& model, double lr) {
  AdamState s;
  s.lr = lr;
  s.m.assign(model.params.size(), 0.0);
  s.v.assign(model.params.size(), 0.0);
  return s;
}

void adam_step(AdamState& state, CnnModel& model, std::span<const double> grad) {
  const std::size_t n = model.params.size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
    throw ArgumentError("adam_step: shape mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    model.params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

// ---------------------------------------------------------------------------
// Model file

namespace {

constexpr char kMagic[4] = {'C', 'P', 'N', '1'};
constexpr int kFormatVersion = 1;

void append_floats(std::string& out, std::span<const double> values) {
  for (double v : values) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

void read_floats(const std::string& payload, std::size_t offset, std::span<double> dst) {
  if (offset > payload.size() || dst.size() * 4 > payload.size() - offset) {
    throw ModelError("model payload truncated");
  }
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const auto* p = reinterpret_cast<const unsigned char*>(payload.data() + offset + 4 * i);
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                               (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) |
                               (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    dst[i] = static_cast<double>(f);
  }
}

}  // namespace

void save(const CnnModel& model, const std::filesystem::path& path) {
  model.validate();
  const CnnConfig& cfg = model.config;
  nlohmann::json header;
  header["format"] = "cepnet-model";
  header["version"] = kFormatVersion;
  header["config"] = {{"input_len", cfg.input_len},
                      {"kernel_len", cfg.kernel_len},
                      {"feature_maps", cfg.feature_maps},
                      {"leaky_slope", cfg.leaky_slope},
                      {"seed", cfg.seed}};
  std::string payload;
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t i = 0; i < kNumLayers; ++i) {
    const LayerShape& s = model.slots[i].shape;
    nlohmann::json layer;
    layer["shape"] = {s.out_maps, cfg.kernel_len, s.in_maps};
    layer["weight_offset"] = payload.size();
    append_floats(payload, model.weights(i));
    layer["bias_offset"] = payload.size();
    append_floats(payload, model.bias(i));
    layers.push_back(layer);
  }
  header["layers"] = layers;
  header["norm_mean_offset"] = payload.size();
  append_floats(payload, model.norm_mean);
  header["norm_std_offset"] = payload.size();
  append_floats(payload, model.norm_std);
  header["payload_bytes"] = payload.size();

  const std::string text = header.dump();
  std::string out(kMagic, 4);
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len >> (8 * i)) & 0xFF));
  out += text;
  out += payload;

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write model " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

CnnModel load(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open model " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(file)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ModelError(path.string() + ": bad magic");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + 4);
  const std::size_t header_len = static_cast<std::size_t>(p[0]) | (p[1] << 8) |
                                 (p[2] << 16) | (static_cast<std::size_t>(p[3]) << 24);
  if (header_len > bytes.size() - 8) throw ModelError(path.string() + ": truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(8, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(path.string() + ": bad header: " + e.what());
  }
  const std::string payload = bytes.substr(8 + header_len);

  try {
    if (header.value("version", -1) != kFormatVersion) {
      throw ModelError(path.string() + ": unsupported model version");
    }
    CnnConfig cfg;
    const auto& c = header.at("config");
    cfg.input_len = c.at("input_len").get<std::size_t>();
    cfg.kernel_len = c.at("kernel_len").get<std::size_t>();
    cfg.feature_maps = c.at("feature_maps").get<std::size_t>();
    cfg.leaky_slope = c.at("leaky_slope").get<double>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
    try {
      cfg.validate();
    } catch (const ArgumentError& e) {
      throw ModelError(path.string() + ": " + e.what());
    }
    if (header.at("payload_bytes").get<std::size_t>() != payload.size()) {
      throw ModelError(path.string() + ": payload size mismatch (truncated file?)");
    }

    CnnModel m = CnnModel::zeros(cfg);
    const auto& layers = header.at("layers");
    if (!layers.is_array() || layers.size() != kNumLayers) {
      throw ModelError(path.string() + ": expected 10 layers");
    }
    for (std::size_t i = 0; i < kNumLayers; ++i) {
      const auto& layer = layers[i];
      const auto shape = layer.at("shape").get<std::vector<std::size_t>>();
      const LayerShape& s = m.slots[i].shape;
      if (shape != std::vector<std::size_t>{s.out_maps, cfg.kernel_len, s.in_maps}) {
        throw ModelError(path.string() + ": layer " + std::to_string(i + 1) +
                         " shape inconsistent with config");
      }
      read_floats(payload, layer.at("weight_offset").get<std::size_t>(), m.weights(i));
      read_floats(payload, layer.at("bias_offset").get<std::size_t>(), m.bias(i));
    }
    read_floats(payload, header.at("norm_mean_offset").get<std::size_t>(), m.norm_mean);
    read_floats(payload, header.at("norm_std_offset").get<std::size_t>(), m.norm_std);
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(path.string() + ": malformed header: " + e.what());
  }
}

}  // namespace cepnet::cnn
