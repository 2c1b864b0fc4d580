// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <thread>

#include "sdrp/chdr.hpp"
#include "sdrp/crossbar.hpp"
#include "sdrp/net.hpp"

namespace sdrp {

// Inter-node transport: CHDR packets ride inside VRT frames over a reliable
// byte stream, each frame preceded by a 4-byte big-endian length.
//
// Handshake, both directions, before any frame:
//   8 bytes magic "SDRPLINK", 1 byte version (1), 1 byte device id.

constexpr char cluster_magic[8] = {'S', 'D', 'R', 'P', 'L', 'I', 'N', 'K'};
constexpr uint8_t cluster_version = 1;
constexpr size_t cluster_hello_bytes = 10;

Bytes cluster_hello(uint8_t device);

// Incremental length-prefixed frame reassembly; tolerates any fragmentation
// or coalescing of the underlying stream. Throws errc::bad_frame on an
// oversized or malformed length prefix.
class FrameReader {
public:
    explicit FrameReader(size_t max_frame = 1 << 20);

    // Feeds arbitrary chunk boundaries; complete frames land in out.
    void feed(ByteSpan chunk, std::vector<Bytes>& out);

private:
    const size_t _max_frame;
    Bytes _pending;
};

Bytes frame_with_length(ByteSpan frame);

struct NodeLinkStats {
    uint64_t tx_frames = 0;
    uint64_t rx_frames = 0;
};

// One cluster connection. Outbound CHDR packets are encapsulated and
// written; a reader thread decapsulates inbound frames and injects them into
// the local crossbar. Implements PacketSink so the crossbar can route whole
// remote devices at this link.
class NodeLink : public PacketSink, public std::enable_shared_from_this<NodeLink> {
public:
    NodeLink(std::unique_ptr<ByteStream> stream, uint8_t local_device, uint8_t peer_device,
             Crossbar& crossbar);
    ~NodeLink() override;

    uint8_t peer_device() const { return _peer_device; }
    bool up() const { return _up.load(); }
    NodeLinkStats stats() const;

    // forward(): encapsulate and send; false when the link is down (the
    // caller accounts the drop locally).
    bool deliver(ChdrPacket&& packet) override;

    void start_rx();
    void shutdown();

private:
    void rx_loop();

    std::unique_ptr<ByteStream> _stream;
    const uint8_t _local_device;
    const uint8_t _peer_device;
    Crossbar& _crossbar;

    std::mutex _tx_mutex;
    uint8_t _vrt_count = 0;
    std::atomic<uint64_t> _tx_frames{0};
    std::atomic<uint64_t> _rx_frames{0};
    std::atomic<bool> _up{true};
    std::thread _rx_thread;
};

// Performs the handshake on an accepted/created stream and registers the
// peer as a device route on the crossbar. Throws errc::duplicate_device when
// the peer claims our id or one that is already routed.
std::shared_ptr<NodeLink> cluster_attach(std::unique_ptr<ByteStream> stream,
                                         uint8_t local_device, Crossbar& crossbar);

// Client side: connect + handshake + attach.
std::shared_ptr<NodeLink> cluster_connect(const Endpoint& peer, uint8_t local_device,
                                          Crossbar& crossbar);

// Server side: accept loop on its own thread, attaching every peer.
class ClusterListener {
public:
    ClusterListener(const Endpoint& bind, uint8_t local_device, Crossbar& crossbar,
                    std::function<void(std::shared_ptr<NodeLink>)> on_link = {});
    ~ClusterListener();

    uint16_t port() const { return _listener.port(); }
    void stop();

private:
    TcpListener _listener;
    uint8_t _local_device;
    Crossbar& _crossbar;
    std::function<void(std::shared_ptr<NodeLink>)> _on_link;
    std::thread _thread;
};

} // namespace sdrp
