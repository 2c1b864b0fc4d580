// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "sdrp/bytes.hpp"

namespace sdrp {

// Reliable, in-order byte stream. TCP in production; an in-memory pipe pair
// backs the unit tests.
class ByteStream {
public:
    virtual ~ByteStream() = default;

    // Returns bytes read, 0 on orderly close. Throws errc::io_error.
    virtual size_t read_some(uint8_t* out, size_t max) = 0;
    // Writes the whole span or throws errc::io_error / errc::link_down.
    virtual void write_all(ByteSpan data) = 0;
    virtual void close() = 0;
    virtual bool is_open() const = 0;

    // Blocking helper: reads exactly n bytes; false on clean EOF at a
    // message boundary, throws errc::truncated on EOF mid-message.
    bool read_exact(uint8_t* out, size_t n);
};

struct Endpoint {
    std::string host;
    uint16_t port = 0;
};

// "host:port" (host may be empty for wildcard binds). Throws
// errc::invalid_argument.
Endpoint parse_endpoint(const std::string& address);

class TcpStream : public ByteStream {
public:
    explicit TcpStream(int fd);
    ~TcpStream() override;

    size_t read_some(uint8_t* out, size_t max) override;
    void write_all(ByteSpan data) override;
    void close() override;
    bool is_open() const override;

private:
    std::atomic<int> _fd;
};

// Throws errc::connection_refused when nobody listens.
std::unique_ptr<TcpStream> tcp_connect(const Endpoint& endpoint);

class TcpListener {
public:
    // Throws errc::endpoint_busy when the port is taken.
    explicit TcpListener(const Endpoint& endpoint);
    ~TcpListener();

    uint16_t port() const { return _port; } // actual port (after binding 0)
    // nullptr once close() was called.
    std::unique_ptr<TcpStream> accept();
    void close();

private:
    std::atomic<int> _fd;
    uint16_t _port = 0;
};

// In-memory connected pair for tests.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe_pair();

} // namespace sdrp
