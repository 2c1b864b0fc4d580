// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "sdrp/sample.hpp"

namespace sdrp::dsp {

// Iterative in-order radix-2 transform. X[k] = sum_n x[n] e^(-2*pi*i*k*n/N);
// the inverse is 1/N-scaled so ifft(fft(x)) == x.
//
// The free functions accept any power-of-two length; processing units
// additionally restrict their length register to fft_unit_lengths.

bool is_power_of_two(size_t n);

// Lengths a deployable FFT unit accepts for its length register.
constexpr size_t fft_unit_min_length = 16;
constexpr size_t fft_unit_max_length = 2048;
bool fft_unit_length_supported(size_t n);

// Throws errc::unsupported_length unless the length is a power of two >= 1.
void fft_in_place(std::span<Sample> x);
void ifft_in_place(std::span<Sample> x);

std::vector<Sample> fft(std::span<const Sample> x);
std::vector<Sample> ifft(std::span<const Sample> x);

} // namespace sdrp::dsp
