// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/rf.hpp"

#include <cmath>
#include <numbers>

#include "sdrp/errors.hpp"

namespace sdrp {

const std::vector<RfParamSpec>& RfFrontend::param_specs() {
    static const std::vector<RfParamSpec> specs{
        {"lo_freq_hz", 7.0e7, 6.0e9, 0.0, 2.412e9},
        {"filter_bw_hz", 2.0e5, 5.6e7, 0.0, 2.0e7},
        {"pa_gain_db", 0.0, 89.75, 0.25, 0.0},
        {"lna_gain_db", 0.0, 76.0, 1.0, 0.0},
    };
    return specs;
}

RfFrontend::RfFrontend() {
    for (const auto& spec : param_specs()) _values[spec.name] = spec.default_value;
}

static const RfParamSpec* find_spec(const std::string& name) {
    for (const auto& spec : RfFrontend::param_specs())
        if (spec.name == name) return &spec;
    return nullptr;
}

RfSetResult RfFrontend::set_param(const std::string& name, double value) {
    const RfParamSpec* spec = find_spec(name);
    if (!spec) raise(errc::unknown_param, name);
    if (!std::isfinite(value) || value < spec->min_value || value > spec->max_value)
        raise(errc::out_of_range, name + " = " + std::to_string(value) + " outside [" +
                                      std::to_string(spec->min_value) + ", " +
                                      std::to_string(spec->max_value) + "]");
    double stored = value;
    if (spec->step > 0) {
        const double steps = std::round((value - spec->min_value) / spec->step);
        stored = spec->min_value + steps * spec->step;
        if (stored < spec->min_value) stored = spec->min_value;
        if (stored > spec->max_value) stored = spec->max_value;
    }
    std::lock_guard lock(_mutex);
    _values[name] = stored;
    return {stored, stored != value};
}

double RfFrontend::get_param(const std::string& name) const {
    if (!find_spec(name)) raise(errc::unknown_param, name);
    std::lock_guard lock(_mutex);
    return _values.at(name);
}

std::map<std::string, double> RfFrontend::all_params() const {
    std::lock_guard lock(_mutex);
    return _values;
}

double NoiseSource::next_uniform() {
    // splitmix64; plenty for a noise model
    _state += 0x9e3779b97f4a7c15ull;
    uint64_t z = _state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return (double(z >> 11) + 1.0) / 9007199254740992.0; // (0, 1]
}

void NoiseSource::next_pair(double& a, double& b) {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    a = r * std::cos(2.0 * std::numbers::pi * u2);
    b = r * std::sin(2.0 * std::numbers::pi * u2);
}

std::vector<Sample> loopback(std::span<const Sample> tx, const ChannelModel& channel) {
    std::vector<Sample> out(tx.begin(), tx.end());
    if (channel.mode == ChannelModel::Mode::identity || tx.empty()) return out;

    double power = 0.0;
    for (const Sample& s : tx) power += s.i * s.i + s.q * s.q;
    power /= double(tx.size());
    if (power <= 0.0) return out;

    const double noise_power = power / std::pow(10.0, channel.snr_db / 10.0);
    const double sigma = std::sqrt(noise_power / 2.0); // per component

    NoiseSource rng(channel.seed);
    for (Sample& s : out) {
        double a, b;
        rng.next_pair(a, b);
        s.i += sigma * a;
        s.q += sigma * b;
    }
    return out;
}

} // namespace sdrp
