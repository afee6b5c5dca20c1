// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CEPNET_G711_HPP_
#define CEPNET_G711_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cepnet/audio_io.hpp"

namespace cepnet::g711 {

enum class Law { kALaw, kMuLaw };

Law parse_law(std::string_view name);  // "alaw" | "ulaw"
std::string_view law_name(Law law);

// Preimage of one codeword in the normalized domain: every x with
// low <= x < high encodes to that codeword. The outermost intervals end at
// -1 and 1; inputs beyond are saturated onto them.
struct QuantInterval {
  double low = 0.0;
  double high = 0.0;

  double width() const { return high - low; }
};

// Linear input is floor(x * 32768) saturated to int16, then companded with
// the ITU-T G.711 segment rules (13-bit A-law, 14-bit mu-law), including the
// standard bit inversions.
std::uint8_t encode(double sample, Law law);
std::uint8_t encode_pcm16(std::int16_t sample, Law law);

// Reconstruction level of the codeword, as int16 and normalized.
std::int16_t decode_pcm16(std::uint8_t codeword, Law law);
double decode(std::uint8_t codeword, Law law);

QuantInterval quant_interval(std::uint8_t codeword, Law law);

std::vector<std::uint8_t> encode(std::span<const double> samples, Law law);
std::vector<double> decode(std::span<const std::uint8_t> codewords, Law law);

// Samples outside the closed interval of their codeword are replaced by the
// nearest interval edge; samples inside are untouched.
AudioSignal constrain(const AudioSignal& enhanced,
                      std::span<const std::uint8_t> codewords, Law law);

}  // namespace cepnet::g711

#endif  // CEPNET_G711_HPP_
