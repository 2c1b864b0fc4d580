// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/cluster.hpp"

#include <cstring>

namespace sdrp {

Bytes cluster_hello(uint8_t device) {
    Bytes hello(cluster_hello_bytes);
    std::memcpy(hello.data(), cluster_magic, sizeof(cluster_magic));
    hello[8] = cluster_version;
    hello[9] = device;
    return hello;
}

FrameReader::FrameReader(size_t max_frame) : _max_frame(max_frame) {}

void FrameReader::feed(ByteSpan chunk, std::vector<Bytes>& out) {
    _pending.insert(_pending.end(), chunk.begin(), chunk.end());
    size_t at = 0;
    while (_pending.size() - at >= 4) {
        const uint32_t length = get_be32(_pending.data() + at);
        if (length == 0 || length > _max_frame)
            raise(errc::bad_frame, "frame length " + std::to_string(length));
        if (_pending.size() - at - 4 < length) break;
        out.emplace_back(_pending.begin() + at + 4, _pending.begin() + at + 4 + length);
        at += 4 + length;
    }
    _pending.erase(_pending.begin(), _pending.begin() + at);
}

Bytes frame_with_length(ByteSpan frame) {
    Bytes out;
    out.reserve(frame.size() + 4);
    append_be32(out, uint32_t(frame.size()));
    out.insert(out.end(), frame.begin(), frame.end());
    return out;
}

NodeLink::NodeLink(std::unique_ptr<ByteStream> stream, uint8_t local_device, uint8_t peer_device,
                   Crossbar& crossbar)
    : _stream(std::move(stream)), _local_device(local_device), _peer_device(peer_device),
      _crossbar(crossbar) {}

NodeLink::~NodeLink() {
    shutdown();
}

NodeLinkStats NodeLink::stats() const {
    return NodeLinkStats{_tx_frames.load(), _rx_frames.load()};
}

bool NodeLink::deliver(ChdrPacket&& packet) {
    if (!_up.load()) return false;
    const uint32_t stream_id = pack_sid(packet.header.sid);
    Bytes chdr = pack_chdr(packet);
    std::lock_guard lock(_tx_mutex);
    Bytes vrt = encapsulate_vrt(chdr, stream_id, _vrt_count);
    _vrt_count = uint8_t((_vrt_count + 1) & 0x0f);
    try {
        _stream->write_all(frame_with_length(vrt));
    } catch (const Error&) {
        _up.store(false);
        return false;
    }
    _tx_frames.fetch_add(1);
    return true;
}

void NodeLink::start_rx() {
    if (_rx_thread.joinable()) return;
    _rx_thread = std::thread([this] { rx_loop(); });
}

void NodeLink::rx_loop() {
    FrameReader reader;
    std::vector<Bytes> frames;
    uint8_t chunk[4096];
    while (_up.load()) {
        size_t n = 0;
        try {
            n = _stream->read_some(chunk, sizeof(chunk));
        } catch (const Error&) {
            break;
        }
        if (n == 0) break;
        frames.clear();
        try {
            reader.feed(ByteSpan(chunk, n), frames);
            for (const Bytes& frame : frames) {
                Bytes chdr = decapsulate_vrt(frame);
                ChdrPacket packet = unpack_chdr(chdr);
                _rx_frames.fetch_add(1);
                _crossbar.route(std::move(packet));
            }
        } catch (const Error&) {
            break; // corrupted peer: drop the link, keep the node alive
        }
    }
    _up.store(false);
}

void NodeLink::shutdown() {
    _up.store(false);
    if (_stream) _stream->close();
    if (_rx_thread.joinable()) _rx_thread.join();
}

std::shared_ptr<NodeLink> cluster_attach(std::unique_ptr<ByteStream> stream, uint8_t local_device,
                                         Crossbar& crossbar) {
    stream->write_all(cluster_hello(local_device));
    uint8_t hello[cluster_hello_bytes];
    if (!stream->read_exact(hello, sizeof(hello)))
        raise(errc::io_error, "peer closed during handshake");
    if (std::memcmp(hello, cluster_magic, sizeof(cluster_magic)) != 0)
        raise(errc::bad_frame, "bad cluster magic");
    if (hello[8] != cluster_version)
        raise(errc::bad_frame, "cluster protocol version " + std::to_string(hello[8]));
    const uint8_t peer = hello[9];
    if (peer == local_device)
        raise(errc::duplicate_device, "peer claims our device id " + std::to_string(peer));

    auto link = std::make_shared<NodeLink>(std::move(stream), local_device, peer, crossbar);
    try {
        crossbar.add_device_route(peer, link, "link:dev" + std::to_string(peer));
    } catch (const Error& e) {
        if (e.code() == errc::duplicate_route)
            raise(errc::duplicate_device, "device " + std::to_string(peer) + " already linked");
        throw;
    }
    link->start_rx();
    return link;
}

std::shared_ptr<NodeLink> cluster_connect(const Endpoint& peer, uint8_t local_device,
                                          Crossbar& crossbar) {
    return cluster_attach(tcp_connect(peer), local_device, crossbar);
}

ClusterListener::ClusterListener(const Endpoint& bind, uint8_t local_device, Crossbar& crossbar,
                                 std::function<void(std::shared_ptr<NodeLink>)> on_link)
    : _listener(bind), _local_device(local_device), _crossbar(crossbar),
      _on_link(std::move(on_link)) {
    _thread = std::thread([this] {
        while (true) {
            auto stream = _listener.accept();
            if (!stream) return;
            try {
                auto link = cluster_attach(std::move(stream), _local_device, _crossbar);
                if (_on_link) _on_link(link);
            } catch (const Error&) {
                // refused peer (bad magic, duplicate device): connection dropped
            }
        }
    });
}

ClusterListener::~ClusterListener() {
    stop();
}

void ClusterListener::stop() {
    _listener.close();
    if (_thread.joinable()) _thread.join();
}

} // namespace sdrp
