// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "sdrp/errors.hpp"

namespace sdrp {

bool ByteStream::read_exact(uint8_t* out, size_t n) {
    size_t got = 0;
    while (got < n) {
        const size_t r = read_some(out + got, n - got);
        if (r == 0) {
            if (got == 0) return false;
            raise(errc::truncated, "stream closed mid-message");
        }
        got += r;
    }
    return true;
}

Endpoint parse_endpoint(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos)
        raise(errc::invalid_argument, "endpoint '" + address + "' must be host:port");
    Endpoint ep;
    ep.host = address.substr(0, colon);
    const std::string port = address.substr(colon + 1);
    char* end = nullptr;
    const unsigned long v = std::strtoul(port.c_str(), &end, 10);
    if (!end || *end != '\0' || v > 65535)
        raise(errc::invalid_argument, "bad port in '" + address + "'");
    ep.port = uint16_t(v);
    return ep;
}

TcpStream::TcpStream(int fd) : _fd(fd) {
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

TcpStream::~TcpStream() {
    close();
}

size_t TcpStream::read_some(uint8_t* out, size_t max) {
    const int fd = _fd.load();
    if (fd < 0) return 0;
    const ssize_t r = ::recv(fd, out, max, 0);
    if (r < 0) {
        if (errno == ECONNRESET || errno == EBADF) return 0;
        raise(errc::io_error, std::string("recv: ") + std::strerror(errno));
    }
    return size_t(r);
}

void TcpStream::write_all(ByteSpan data) {
    size_t sent = 0;
    while (sent < data.size()) {
        const int fd = _fd.load();
        if (fd < 0) raise(errc::link_down, "stream closed");
        const ssize_t w = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EPIPE || errno == ECONNRESET || errno == EBADF)
                raise(errc::link_down, std::string("send: ") + std::strerror(errno));
            raise(errc::io_error, std::string("send: ") + std::strerror(errno));
        }
        sent += size_t(w);
    }
}

void TcpStream::close() {
    const int fd = _fd.exchange(-1);
    if (fd >= 0) {
        ::shutdown(fd, SHUT_RDWR);
        ::close(fd);
    }
}

bool TcpStream::is_open() const {
    return _fd.load() >= 0;
}

static sockaddr_in resolve(const Endpoint& endpoint) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(endpoint.port);
    const std::string host = endpoint.host.empty() ? "0.0.0.0" : endpoint.host;
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        addrinfo hints{};
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* result = nullptr;
        if (::getaddrinfo(host.c_str(), nullptr, &hints, &result) != 0 || !result)
            raise(errc::invalid_argument, "cannot resolve host '" + host + "'");
        addr.sin_addr = reinterpret_cast<sockaddr_in*>(result->ai_addr)->sin_addr;
        ::freeaddrinfo(result);
    }
    return addr;
}

std::unique_ptr<TcpStream> tcp_connect(const Endpoint& endpoint) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) raise(errc::io_error, "socket");
    sockaddr_in addr = resolve(endpoint);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const int err = errno;
        ::close(fd);
        if (err == ECONNREFUSED)
            raise(errc::connection_refused,
                  endpoint.host + ":" + std::to_string(endpoint.port));
        raise(errc::io_error, std::string("connect: ") + std::strerror(err));
    }
    return std::make_unique<TcpStream>(fd);
}

TcpListener::TcpListener(const Endpoint& endpoint) : _fd(-1) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) raise(errc::io_error, "socket");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = resolve(endpoint);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const int err = errno;
        ::close(fd);
        if (err == EADDRINUSE)
            raise(errc::endpoint_busy, endpoint.host + ":" + std::to_string(endpoint.port));
        raise(errc::io_error, std::string("bind: ") + std::strerror(err));
    }
    if (::listen(fd, 16) != 0) {
        ::close(fd);
        raise(errc::io_error, "listen");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    _port = ntohs(addr.sin_port);
    _fd.store(fd);
}

TcpListener::~TcpListener() {
    close();
}

std::unique_ptr<TcpStream> TcpListener::accept() {
    const int fd = _fd.load();
    if (fd < 0) return nullptr;
    const int client = ::accept(fd, nullptr, nullptr);
    if (client < 0) return nullptr; // closed under us
    return std::make_unique<TcpStream>(client);
}

void TcpListener::close() {
    const int fd = _fd.exchange(-1);
    if (fd >= 0) {
        ::shutdown(fd, SHUT_RDWR);
        ::close(fd);
    }
}

// ---- in-memory pipe ----------------------------------------------------------

namespace {

struct PipeCore {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<uint8_t> a_to_b;
    std::deque<uint8_t> b_to_a;
    bool closed = false;
};

class PipeStream : public ByteStream {
public:
    PipeStream(std::shared_ptr<PipeCore> core, bool is_a) : _core(std::move(core)), _is_a(is_a) {}

    size_t read_some(uint8_t* out, size_t max) override {
        std::unique_lock lock(_core->mutex);
        auto& queue = _is_a ? _core->b_to_a : _core->a_to_b;
        _core->cv.wait(lock, [&] { return _core->closed || !queue.empty(); });
        if (queue.empty()) return 0;
        const size_t n = std::min(max, queue.size());
        for (size_t i = 0; i < n; i++) {
            out[i] = queue.front();
            queue.pop_front();
        }
        return n;
    }

    void write_all(ByteSpan data) override {
        std::lock_guard lock(_core->mutex);
        if (_core->closed) raise(errc::link_down, "pipe closed");
        auto& queue = _is_a ? _core->a_to_b : _core->b_to_a;
        queue.insert(queue.end(), data.begin(), data.end());
        _core->cv.notify_all();
    }

    void close() override {
        std::lock_guard lock(_core->mutex);
        _core->closed = true;
        _core->cv.notify_all();
    }

    bool is_open() const override {
        std::lock_guard lock(_core->mutex);
        return !_core->closed;
    }

private:
    std::shared_ptr<PipeCore> _core;
    bool _is_a;
};

} // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe_pair() {
    auto core = std::make_shared<PipeCore>();
    return {std::make_unique<PipeStream>(core, true), std::make_unique<PipeStream>(core, false)};
}

} // namespace sdrp
