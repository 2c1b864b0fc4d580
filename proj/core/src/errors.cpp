// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/errors.hpp"

namespace sdrp {

const char* to_string(errc code) {
    switch (code) {
    case errc::inconsistent_length: return "InconsistentLength";
    case errc::oversize_mtu: return "OversizeMtu";
    case errc::truncated: return "Truncated";
    case errc::bad_length: return "BadLength";
    case errc::oversize_frame: return "OversizeFrame";
    case errc::bad_frame: return "BadFrame";
    case errc::duplicate_kind: return "DuplicateKind";
    case errc::invalid_descriptor: return "InvalidDescriptor";
    case errc::unknown_kind: return "UnknownKind";
    case errc::param_out_of_range: return "ParamOutOfRange";
    case errc::unknown_offset: return "UnknownOffset";
    case errc::value_out_of_range: return "ValueOutOfRange";
    case errc::port_occupied: return "PortOccupied";
    case errc::no_such_port: return "NoSuchPort";
    case errc::unsupported_length: return "UnsupportedLength";
    case errc::length_not_multiple: return "LengthNotMultiple";
    case errc::invalid_rate: return "InvalidRate";
    case errc::duplicate_route: return "DuplicateRoute";
    case errc::malformed_command: return "MalformedCommand";
    case errc::syntax_error: return "SyntaxError";
    case errc::dangling_port: return "DanglingPort";
    case errc::admission_failed: return "AdmissionFailed";
    case errc::unknown_chain: return "UnknownChain";
    case errc::occupant_too_large: return "OccupantTooLarge";
    case errc::incompatible_boundary: return "IncompatibleBoundary";
    case errc::ring_full: return "RingFull";
    case errc::oversize_packet: return "OversizePacket";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::unknown_param: return "UnknownParam";
    case errc::out_of_range: return "OutOfRange";
    case errc::connection_refused: return "ConnectionRefused";
    case errc::duplicate_device: return "DuplicateDevice";
    case errc::link_down: return "LinkDown";
    case errc::endpoint_busy: return "EndpointBusy";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace sdrp
