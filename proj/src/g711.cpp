// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepnet/g711.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cepnet/errors.hpp"

namespace cepnet::g711 {
namespace {

// Bit-level companders follow the G.191 reference (alaw_compress /
// ulaw_compress); negative inputs use the one's complement.
std::uint8_t alaw_compress(std::int16_t x) {
  int ix = x < 0 ? (~x) >> 4 : x >> 4;  // 0 <= ix < 2048
  if (ix > 15) {
    int exponent = 1;
    while (ix > 16 + 15) {
      ix >>= 1;
      ++exponent;
    }
    ix -= 16;
    ix += exponent << 4;
  }
  if (x >= 0) ix |= 0x80;
  return static_cast<std::uint8_t>(ix ^ 0x55);
}

std::int16_t alaw_expand(std::uint8_t code) {
  const int ix = code ^ 0x55;
  const int exponent = (ix & 0x70) >> 4;
  int mantissa = ix & 0x0F;
  if (exponent > 0) mantissa += 16;
  mantissa = (mantissa << 4) + 0x08;
  if (exponent > 1) mantissa <<= (exponent - 1);
  return static_cast<std::int16_t>(ix > 127 ? mantissa : -mantissa);
}

std::uint8_t ulaw_compress(std::int16_t x) {
  int absno = x < 0 ? ((~x) >> 2) + 33 : (x >> 2) + 33;
  if (absno > 0x1FFF) absno = 0x1FFF;
  int i = absno >> 6;
  int segno = 1;
  while (i != 0) {
    ++segno;
    i >>= 1;
  }
  const int high_nibble = 0x08 - segno;
  const int low_nibble = 0x0F - ((absno >> segno) & 0x0F);
  int code = (high_nibble << 4) | low_nibble;
  if (x >= 0) code |= 0x80;
  return static_cast<std::uint8_t>(code);
}

std::int16_t ulaw_expand(std::uint8_t code) {
  const int sign = code < 0x80 ? -1 : 1;
  const int inverted = ~code;
  const int exponent = (inverted >> 4) & 0x07;
  const int mantissa = inverted & 0x0F;
  const int step = 4 << (exponent + 1);
  return static_cast<std::int16_t>(
      sign * ((0x80 << exponent) + step * mantissa + step / 2 - 4 * 33));
}

struct LawTables {
  std::array<std::int16_t, 256> level{};
  std::array<QuantInterval, 256> interval{};
};

LawTables build_tables(Law law) {
  LawTables t;
  for (int c = 0; c < 256; ++c) {
    const auto code = static_cast<std::uint8_t>(c);
    t.level[c] = law == Law::kALaw ? alaw_expand(code) : ulaw_expand(code);
  }
  // The compander is monotone in its input, so each preimage is a run of
  // consecutive int16 values; one sweep finds all run boundaries.
  std::array<int, 256> first;
  std::array<int, 256> last;
  first.fill(1 << 20);
  last.fill(-(1 << 20));
  for (int v = -32768; v <= 32767; ++v) {
    const std::uint8_t c = encode_pcm16(static_cast<std::int16_t>(v), law);
    first[c] = std::min(first[c], v);
    last[c] = std::max(last[c], v);
  }
  for (int c = 0; c < 256; ++c) {
    t.interval[c] = {first[c] / 32768.0, (last[c] + 1) / 32768.0};
  }
  return t;
}

const LawTables& tables(Law law) {
  static const LawTables kALaw = build_tables(Law::kALaw);
  static const LawTables kMuLaw = build_tables(Law::kMuLaw);
  return law == Law::kALaw ? kALaw : kMuLaw;
}

}  // namespace

Law parse_law(std::string_view name) {
  if (name == "alaw" || name == "a" || name == "A") return Law::kALaw;
  if (name == "ulaw" || name == "mulaw" || name == "u") return Law::kMuLaw;
  throw ArgumentError("unknown G.711 law '" + std::string(name) + "'");
}

std::string_view law_name(Law law) {
  return law == Law::kALaw ? "alaw" : "ulaw";
}

std::uint8_t encode_pcm16(std::int16_t sample, Law law) {
  return law == Law::kALaw ? alaw_compress(sample) : ulaw_compress(sample);
}

std::uint8_t encode(double sample, Law law) {
  double scaled = std::floor(sample * 32768.0);
  if (std::isnan(scaled)) scaled = 0.0;
  scaled = std::clamp(scaled, -32768.0, 32767.0);
  return encode_pcm16(static_cast<std::int16_t>(scaled), law);
}

std::int16_t decode_pcm16(std::uint8_t codeword, Law law) {
  return tables(law).level[codeword];
}

double decode(std::uint8_t codeword, Law law) {
  return decode_pcm16(codeword, law) / 32768.0;
}

QuantInterval quant_interval(std::uint8_t codeword, Law law) {
  return tables(law).interval[codeword];
}

std::vector<std::uint8_t> encode(std::span<const double> samples, Law law) {
  std::vector<std::uint8_t> out(samples.size());
  std::transform(samples.begin(), samples.end(), out.begin(),
                 [law](double s) { return encode(s, law); });
  return out;
}

std::vector<double> decode(std::span<const std::uint8_t> codewords, Law law) {
  std::vector<double> out(codewords.size());
  std::transform(codewords.begin(), codewords.end(), out.begin(),
                 [law](std::uint8_t c) { return decode(c, law); });
  return out;
}

AudioSignal constrain(const AudioSignal& enhanced,
                      std::span<const std::uint8_t> codewords, Law law) {
  if (enhanced.samples.size() != codewords.size()) {
    throw ArgumentError("constrain: signal has " +
                        std::to_string(enhanced.samples.size()) +
                        " samples but " + std::to_string(codewords.size()) +
                        " codewords");
  }
  AudioSignal out = enhanced;
  const auto& iv = tables(law).interval;
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    const QuantInterval& q = iv[codewords[n]];
    // The top interval is closed at full scale, which is not representable.
    const double high = std::min(q.high, 32767.0 / 32768.0);
    out.samples[n] = std::clamp(out.samples[n], q.low, high);
  }
  return out;
}

}  // namespace cepnet::g711
