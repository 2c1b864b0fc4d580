// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdrp/sample.hpp"

namespace sdrp::dsp {

// Gray-coded square constellations at unit average power. Orders 2 (BPSK),
// 4 (QPSK), 16 and 64; normalization 1, 1/sqrt(2), 1/sqrt(10), 1/sqrt(42).
//
// Bit groups are MSB first. For square constellations the first half of the
// group selects the I axis, the second half the Q axis; per-axis Gray code:
//   1 bit:  0 -> -1, 1 -> +1
//   2 bits: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
//   3 bits: 000 -3 ... per table in qam.cpp, levels -7..+7
// BPSK maps onto the I axis only (bit 0 -> (-1, 0), bit 1 -> (+1, 0)).

bool qam_order_supported(unsigned order);
unsigned qam_bits_per_symbol(unsigned order); // throws errc::invalid_argument

// bits values must be 0/1; bits.size() must divide by bits-per-symbol,
// otherwise errc::length_not_multiple.
std::vector<Sample> qam_map(std::span<const uint8_t> bits, unsigned order);

// Hard-decision demap; exact inverse of qam_map over a clean channel.
std::vector<uint8_t> qam_demap(std::span<const Sample> symbols, unsigned order);

} // namespace sdrp::dsp
