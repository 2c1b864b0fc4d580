// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "sdrp/sample.hpp"

namespace sdrp {

// Mocked analog plane. Parameter ranges and step grids model an AD9361-class
// transceiver; values are registers only, nothing is synthesized from them.
struct RfParamSpec {
    std::string name;
    double min_value;
    double max_value;
    double step; // 0 = continuous
    double default_value;
};

struct RfSetResult {
    double value;  // value actually stored, after grid snapping
    bool snapped;  // true when the request was adjusted to the grid
};

class RfFrontend {
public:
    RfFrontend();

    static const std::vector<RfParamSpec>& param_specs();

    // Throws errc::unknown_param, errc::out_of_range. Requests are snapped to
    // the parameter's step grid; the ack reports whether snapping occurred.
    RfSetResult set_param(const std::string& name, double value);
    double get_param(const std::string& name) const;

    std::map<std::string, double> all_params() const;

private:
    mutable std::mutex _mutex;
    std::map<std::string, double> _values;
};

// Test channel standing in for the RF boards.
struct ChannelModel {
    enum class Mode : uint8_t { identity, awgn };
    Mode mode = Mode::identity;
    double snr_db = 20.0; // awgn only
    uint64_t seed = 1;    // awgn only
};

// identity: output == input. awgn: adds seeded complex Gaussian noise at the
// configured SNR relative to the measured input power (Box-Muller generator,
// reproducible for a given seed).
std::vector<Sample> loopback(std::span<const Sample> tx, const ChannelModel& channel);

// Streaming AWGN with persistent generator state, used by the loopback block.
class NoiseSource {
public:
    explicit NoiseSource(uint64_t seed) : _state(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    // Unit-variance Gaussian pair via Box-Muller.
    void next_pair(double& a, double& b);

private:
    double next_uniform(); // (0, 1]
    uint64_t _state;
};

} // namespace sdrp
