// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/bytes.hpp"

#include "sdrp/errors.hpp"

namespace sdrp {

static const char hexdigits[] = "0123456789abcdef";

std::string to_hex(ByteSpan data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(hexdigits[b >> 4]);
        out.push_back(hexdigits[b & 0x0f]);
    }
    return out;
}

static int hexval(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(const std::string& text) {
    if (text.size() % 2 != 0) raise(errc::bad_frame, "odd hex length");
    Bytes out;
    out.reserve(text.size() / 2);
    for (size_t i = 0; i < text.size(); i += 2) {
        int hi = hexval(text[i]);
        int lo = hexval(text[i + 1]);
        if (hi < 0 || lo < 0) raise(errc::bad_frame, "non-hex character");
        out.push_back(uint8_t(hi << 4 | lo));
    }
    return out;
}

} // namespace sdrp
