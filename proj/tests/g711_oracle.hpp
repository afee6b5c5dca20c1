// Copyright 2026 The cepnet Authors
// SPDX-License-Identifier: Apache-2.0

// Table-driven G.711 written from the segment tables of the standard: each
// segment is a start value and a step size on the companded magnitude scale.
// Negative int16 inputs use the one's complement (~x), as the ITU software
// tools do.

#ifndef CEPNET_TESTS_G711_ORACLE_HPP_
#define CEPNET_TESTS_G711_ORACLE_HPP_

#include <array>
#include <cstdint>

namespace cepnet::oracle {

// A-law on the 12-bit magnitude scale (int16 >> 4): eight segments, the
// first two with unit steps, then doubling.
struct ASegment {
  int start;
  int step;
};
inline constexpr std::array<ASegment, 8> kASegments{{
    {0, 1}, {16, 1}, {32, 2}, {64, 4}, {128, 8}, {256, 16}, {512, 32}, {1024, 64}}};

inline std::uint8_t alaw_encode(std::int16_t x) {
  const int mag = (x < 0 ? -static_cast<int>(x) - 1 : x) >> 4;
  int seg = 7;
  while (mag < kASegments[seg].start) --seg;
  const int q = (mag - kASegments[seg].start) / kASegments[seg].step;
  const int code = (x >= 0 ? 0x80 : 0) | (seg << 4) | q;
  return static_cast<std::uint8_t>(code ^ 0x55);  // even-bit inversion
}

inline std::int16_t alaw_decode(std::uint8_t c) {
  const int code = c ^ 0x55;
  const int seg = (code >> 4) & 7;
  const int q = code & 15;
  const ASegment& s = kASegments[seg];
  // midpoint of the decision interval, back on the int16 scale
  const int v = (s.start + q * s.step) * 16 + s.step * 8;
  return static_cast<std::int16_t>((code & 0x80) ? v : -v);
}

// mu-law on the biased 14-bit scale (int16 >> 2, plus 33): segment s covers
// [32 * 2^s, 64 * 2^s) with steps of 2^(s+1).
inline std::uint8_t ulaw_encode(std::int16_t x) {
  int biased = ((x < 0 ? -static_cast<int>(x) - 1 : x) >> 2) + 33;
  if (biased > 8191) biased = 8191;
  int seg = 0;
  while (biased >= (64 << seg)) ++seg;
  const int q = (biased - (32 << seg)) >> (seg + 1);
  const int code = (seg << 4) | q;
  return static_cast<std::uint8_t>(((x >= 0) ? 0x80 : 0) | (~code & 0x7F));
}

inline std::int16_t ulaw_decode(std::uint8_t c) {
  const int code = ~c & 0x7F;
  const int seg = code >> 4;
  const int q = code & 15;
  const int biased_mid = (32 << seg) + q * (2 << seg) + (1 << seg);
  const int v = (biased_mid - 33) * 4;
  return static_cast<std::int16_t>((c & 0x80) ? v : -v);
}

}  // namespace cepnet::oracle

#endif  // CEPNET_TESTS_G711_ORACLE_HPP_
