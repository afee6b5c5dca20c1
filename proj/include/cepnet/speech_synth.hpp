// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_SPEECH_SYNTH_HPP_
#define CEPNET_SPEECH_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "cepnet/audio_io.hpp"

namespace cepnet::synth {

// Deterministic speech-like material: glottal pulse trains through gliding
// formant resonators, noise fricatives, and pauses between phrases. Stands in
// for a speech corpus where none can be shipped.
struct SynthConfig {
  double seconds = 10.0;
  int sample_rate_hz = 8000;
  std::uint64_t seed = 1;
  double level_dbfs = -26.0;
  double pause_fraction = 0.2;  // rough share of silent time
  bool band_limit = true;       // telephone-channel filtering before leveling
};

AudioSignal generate(const SynthConfig& cfg);

// `count` files of `seconds` each, seeds seed, seed+1, ...
std::vector<AudioSignal> corpus(std::size_t count, double seconds,
                                int sample_rate_hz, std::uint64_t seed);

}  // namespace cepnet::synth

#endif  // CEPNET_SPEECH_SYNTH_HPP_
