// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sdrp {

// Every operation that can refuse its input does so with one of these codes.
// Soft conditions (a stalled stream, an unroutable packet) are reported through
// return values and counters instead, never through exceptions.
enum class errc {
    // framing
    inconsistent_length,
    oversize_mtu,
    truncated,
    bad_length,
    oversize_frame,
    bad_frame,
    // unit core / catalog
    duplicate_kind,
    invalid_descriptor,
    unknown_kind,
    param_out_of_range,
    unknown_offset,
    value_out_of_range,
    port_occupied,
    no_such_port,
    // dsp
    unsupported_length,
    length_not_multiple,
    invalid_rate,
    // crossbar
    duplicate_route,
    malformed_command,
    // chain manager
    syntax_error,
    dangling_port,
    admission_failed,
    unknown_chain,
    occupant_too_large,
    incompatible_boundary,
    // mac / dma
    ring_full,
    oversize_packet,
    budget_exceeded,
    // rf frontend
    unknown_param,
    out_of_range,
    // cluster transport
    connection_refused,
    duplicate_device,
    link_down,
    // control plane
    endpoint_busy,
    // generic
    invalid_argument,
    io_error,
};

const char* to_string(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), _code(code) {}

    errc code() const noexcept { return _code; }

private:
    errc _code;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
    throw Error(code, what);
}

} // namespace sdrp
