// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/dsp/fir.hpp"

#include <cmath>

#include "sdrp/errors.hpp"

namespace sdrp::dsp {

FirFilter::FirFilter(std::vector<double> taps) : _taps(std::move(taps)) {
    if (_taps.empty()) raise(errc::invalid_argument, "tap set must be non-empty");
    for (double t : _taps)
        if (!std::isfinite(t)) raise(errc::invalid_argument, "non-finite tap");
    _history.assign(_taps.size() > 0 ? _taps.size() - 1 : 0, Sample{});
}

void FirFilter::process(std::span<const Sample> in, std::span<Sample> out) {
    const size_t T = _taps.size();
    for (size_t n = 0; n < in.size(); n++) {
        double acc_i = 0.0, acc_q = 0.0;
        for (size_t k = 0; k < T; k++) {
            Sample x;
            if (k <= n) {
                x = in[n - k];
            } else {
                const size_t h = k - n - 1; // history index, most recent first
                if (h < _history.size()) x = _history[h];
            }
            acc_i += _taps[k] * x.i;
            acc_q += _taps[k] * x.q;
        }
        out[n] = Sample{acc_i, acc_q};
    }
    // History becomes the most recent T-1 samples of (old history ++ in).
    const size_t H = _history.size();
    if (H > 0 && !in.empty()) {
        std::vector<Sample> updated(H, Sample{});
        for (size_t h = 0; h < H; h++) {
            if (h < in.size())
                updated[h] = in[in.size() - 1 - h];
            else
                updated[h] = _history[h - in.size()];
        }
        _history = std::move(updated);
    }
}

std::vector<Sample> FirFilter::process(std::span<const Sample> in) {
    std::vector<Sample> out(in.size());
    process(in, out);
    return out;
}

void FirFilter::reset() {
    std::fill(_history.begin(), _history.end(), Sample{});
}

std::vector<Sample> fir_filter(std::span<const Sample> x, std::span<const double> taps) {
    FirFilter f(std::vector<double>(taps.begin(), taps.end()));
    return f.process(x);
}

} // namespace sdrp::dsp
