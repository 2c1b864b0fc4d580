// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/dsp/fft.hpp"

#include <cmath>
#include <numbers>

#include "sdrp/errors.hpp"

namespace sdrp::dsp {

bool is_power_of_two(size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

bool fft_unit_length_supported(size_t n) {
    return is_power_of_two(n) && n >= fft_unit_min_length && n <= fft_unit_max_length;
}

static void transform(std::span<Sample> x, bool inverse) {
    const size_t n = x.size();
    if (!is_power_of_two(n))
        raise(errc::unsupported_length, std::to_string(n) + " is not a power of two");
    if (n == 1) return;

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; i++) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / double(len);
        const double wr = std::cos(ang), wi = std::sin(ang);
        for (size_t i = 0; i < n; i += len) {
            double cr = 1.0, ci = 0.0;
            for (size_t j = 0; j < len / 2; j++) {
                Sample& u = x[i + j];
                Sample& v = x[i + j + len / 2];
                const double tr = v.i * cr - v.q * ci;
                const double ti = v.i * ci + v.q * cr;
                v.i = u.i - tr;
                v.q = u.q - ti;
                u.i += tr;
                u.q += ti;
                const double ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / double(n);
        for (Sample& s : x) {
            s.i *= scale;
            s.q *= scale;
        }
    }
}

void fft_in_place(std::span<Sample> x) {
    transform(x, false);
}

void ifft_in_place(std::span<Sample> x) {
    transform(x, true);
}

std::vector<Sample> fft(std::span<const Sample> x) {
    std::vector<Sample> out(x.begin(), x.end());
    fft_in_place(out);
    return out;
}

std::vector<Sample> ifft(std::span<const Sample> x) {
    std::vector<Sample> out(x.begin(), x.end());
    ifft_in_place(out);
    return out;
}

} // namespace sdrp::dsp
