// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_PIPELINE_HPP_
#define CEPNET_PIPELINE_HPP_

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "cepnet/audio_io.hpp"
#include "cepnet/cnn.hpp"
#include "cepnet/framing.hpp"
#include "cepnet/g711.hpp"
#include "cepnet/postfilter.hpp"

namespace cepnet::pipeline {

enum class Mode { kCnnTime, kCnnCepstral, kBaselinePostfilter };
Mode parse_mode(std::string_view name);  // time | cepstral | postfilter
std::string_view mode_name(Mode m);

struct EnhanceOptions {
  Mode mode = Mode::kCnnCepstral;
  StructureId structure = StructureId::kS3;
  bool constrain = false;
  g711::Law law = g711::Law::kALaw;
  bool c0_floor = false;
  // Drop the algorithmic delay so the output lines up with the input.
  // Otherwise the output is the causal stream, leading with `delay` zeros.
  bool align = false;
  postfilter::PostfilterConfig postfilter;
};

// Output has the input's length and rate. CNN modes require `model` with the
// L of the structure at the input rate (ConfigError otherwise).
AudioSignal enhance(const AudioSignal& coded, const EnhanceOptions& opts,
                    const cnn::CnnModel* model = nullptr);

// Algorithmic delay of a configuration, in samples at the given rate.
std::size_t delay_samples(const EnhanceOptions& opts, int sample_rate_hz);

struct EnhanceJob {
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path model;  // CNN modes
  EnhanceOptions options;
};

AudioSignal enhance(const EnhanceJob& job);

// Encodes and decodes every *.wav of clean_dir into coded_dir (same names).
// Files not at 8 kHz are skipped and reported. With keep_codewords, the raw
// codeword stream is written next to each file as <name>.g711.
struct MakePairsReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::filesystem::path> skipped;
};
MakePairsReport make_pairs(const std::filesystem::path& clean_dir,
                           const std::filesystem::path& coded_dir, g711::Law law,
                           bool keep_codewords = false);

// Encoder-decoder weights that pass any frame through unchanged (F >= 2):
// the first layer splits x into the two rectified halves, the long skip
// carries them past the zeroed middle, the last layer recombines them.
cnn::CnnModel identity_model(const cnn::CnnConfig& cfg);

std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir);

}  // namespace cepnet::pipeline

#endif  // CEPNET_PIPELINE_HPP_
