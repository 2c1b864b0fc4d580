// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sdrp::dsp {

// Constraint-length-7 convolutional code, generators 133/171 (octal), with
// the usual puncturing to rates 2/3 and 3/4:
//
//   rate 1/2: A1 B1  A2 B2  ...                 (no puncturing)
//   rate 2/3: A1 B1  A2     | per 2 input bits  (B2 stolen)
//   rate 3/4: A1 B1  B2  A3 | per 3 input bits  (A2, B3 stolen)
//
// The encoder always flushes 6 zero tail bits, so the trellis ends in state
// zero. Puncturing is applied cyclically over the tail as well and truncated
// at the end of the burst; the punctured length uniquely determines the
// unpunctured length, which lets the decoder return exactly the original
// message bits for any input length.

enum class ConvRate : uint8_t { r1_2 = 0, r2_3 = 1, r3_4 = 2 };

constexpr unsigned conv_constraint = 7;
constexpr unsigned conv_tail_bits = conv_constraint - 1;
constexpr unsigned conv_gen_a = 0133; // octal
constexpr unsigned conv_gen_b = 0171;

// "1/2", "2/3", "3/4" -> rate; throws errc::invalid_rate.
ConvRate conv_rate_from_string(const std::string& text);
const char* to_string(ConvRate rate);

// Coded bit count for a message of `message_bits` bits (tail included).
size_t conv_coded_length(size_t message_bits, ConvRate rate);

// bits values 0/1. Returns punctured coded bits.
std::vector<uint8_t> conv_encode(std::span<const uint8_t> bits, ConvRate rate);

// Hard-decision Viterbi over the full burst; returns exactly the original
// message bits (tail stripped). Throws errc::invalid_argument when the coded
// length matches no message length.
std::vector<uint8_t> viterbi_decode(std::span<const uint8_t> coded, ConvRate rate);

} // namespace sdrp::dsp
