// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <memory>
#include <thread>
#include <variant>

#include "sdrp/chdr.hpp"
#include "sdrp/events.hpp"
#include "sdrp/executor.hpp"
#include "sdrp/unit.hpp"

namespace sdrp {

// Anything a crossbar route can point at. deliver() returns false when the
// target cannot take the packet (a downed link); the switch accounts the
// drop.
class PacketSink {
public:
    virtual ~PacketSink() = default;
    virtual bool deliver(ChdrPacket&& packet) = 0;
};

// A CHDR endpoint: a bounded ingress queue with an endpoint id, unique per
// device. Delivery blocks while the queue is full (flow control).
class ChdrEndpoint : public PacketSink {
public:
    explicit ChdrEndpoint(uint8_t endpoint_id, size_t capacity = 64);

    uint8_t endpoint_id() const { return _endpoint_id; }

    bool deliver(ChdrPacket&& packet) override; // blocks on a full queue

    std::optional<ChdrPacket> try_pop();
    std::optional<ChdrPacket> pop(); // blocks; nullopt after close
    size_t queued() const;

    void close();
    void set_waker(std::function<void()> waker);

private:
    const uint8_t _endpoint_id;
    const size_t _capacity;
    mutable std::mutex _mutex;
    std::condition_variable _not_full;
    std::condition_variable _not_empty;
    std::deque<ChdrPacket> _queue;
    bool _closed = false;
    std::function<void()> _waker;
};

struct PortStats {
    uint64_t packets = 0;
    uint64_t bytes = 0;
    uint64_t drops = 0;
};

struct CrossbarStats {
    uint64_t packets_in = 0;
    uint64_t packets_delivered = 0;
    uint64_t packets_dropped = 0; // NoRoute and downed links
    std::map<std::string, PortStats> per_target;
};

// RFNoC-style crossbar switch. Routes CHDR packets by destination SID:
// an exact (device, endpoint) entry wins over a (device, *) wildcard used
// for remote transports. Unroutable packets are dropped, counted and
// reported as events rather than blocking the switch.
class Crossbar {
public:
    explicit Crossbar(uint8_t local_device, EventBus* events = nullptr);

    uint8_t local_device() const { return _local_device; }

    // Throws errc::duplicate_route.
    void add_route(uint8_t device, uint8_t endpoint, std::shared_ptr<PacketSink> target,
                   const std::string& label = {});
    void add_device_route(uint8_t device, std::shared_ptr<PacketSink> target,
                          const std::string& label = {});
    void remove_route(uint8_t device, uint8_t endpoint);
    void remove_device_route(uint8_t device);
    bool has_route(uint8_t device, uint8_t endpoint) const;

    // Looks up the target under the table lock, then delivers outside it so
    // flow control on one port cannot wedge the whole switch. Per-flow order
    // holds because each flow is produced by a single context.
    void route(ChdrPacket&& packet);

    CrossbarStats stats() const;

    // Allocates a fresh endpoint id on this device (for chain deploys).
    uint8_t allocate_endpoint_id();

private:
    struct Target {
        std::shared_ptr<PacketSink> sink;
        std::string label;
    };

    const uint8_t _local_device;
    EventBus* _events;

    mutable std::mutex _mutex;
    std::map<std::pair<uint8_t, uint8_t>, Target> _routes;
    std::map<uint8_t, Target> _device_routes;
    CrossbarStats _stats;
    uint8_t _next_endpoint = 1;
};

// Wraps a shared processing unit behind a CHDR endpoint. Data packets are
// deframed to samples, pushed through the unit burst by burst (bursts are
// end_of_burst-delimited trains of packets per source SID), and reframed
// with source/destination exchanged, or redirected by the per-source return
// map. Command packets carry (offset, value) register writes and yield
// Response packets with per-write status words.
class SharedUnitWrapper : public std::enable_shared_from_this<SharedUnitWrapper> {
public:
    // Response status codes.
    static constexpr uint32_t status_ok = 0;
    static constexpr uint32_t status_unknown_offset = 1;
    static constexpr uint32_t status_out_of_range = 2;
    static constexpr uint32_t status_malformed = 3;

    SharedUnitWrapper(Crossbar& crossbar, std::shared_ptr<UnitInstance> unit, uint8_t endpoint_id,
                      size_t queue_capacity = 64, size_t mtu = default_mtu);
    ~SharedUnitWrapper();

    std::shared_ptr<ChdrEndpoint> endpoint() { return _endpoint; }
    UnitInstance& unit() { return *_unit; }

    // Reply destination for bursts arriving from `source`; defaults to the
    // swapped SID when no entry exists.
    void set_return_route(const StreamId& source, const StreamId& reply_to);

    void start();
    void stop();

    uint64_t bursts_processed() const { return _bursts.load(); }

private:
    void pump();
    void handle_command(const ChdrPacket& packet);
    void handle_data(const ChdrPacket& packet);
    void process_and_reply(const StreamId& from);
    void send_error_response(const StreamId& to, uint32_t status);

    Crossbar& _crossbar;
    std::shared_ptr<UnitInstance> _unit;
    std::shared_ptr<ChdrEndpoint> _endpoint;
    const size_t _mtu;

    struct Accum {
        Bytes items; // raw item bytes
        size_t count = 0;
    };
    std::map<uint32_t, Accum> _accum; // keyed by packed source SID
    std::map<uint32_t, StreamId> _return_map;
    std::map<uint32_t, uint16_t> _tx_seq; // per reply SID

    std::thread _thread;
    std::atomic<bool> _stop{false};
    std::atomic<uint64_t> _bursts{0};
    std::mutex _mutex; // guards _return_map
};

// Pumps a unit's output stream into the switch as CHDR Data packets:
// MTU-sized chunks, end_of_burst on the last packet of each burst. Burst
// metadata does not survive the switch (crossbar links carry plain sample
// streams); pads must be resolved before a crossbar hop.
class CrossbarEgress {
public:
    CrossbarEgress(Crossbar& crossbar, std::shared_ptr<StreamBuffer> source, StreamId flow_sid,
                   size_t mtu = default_mtu);
    ~CrossbarEgress();

    const StreamId& flow_sid() const { return _sid; }

    void start();
    void stop();

private:
    void run();
    void emit(std::span<const Sample> samples, bool end_of_burst);

    Crossbar& _crossbar;
    std::shared_ptr<StreamBuffer> _source;
    StreamId _sid;
    const size_t _per_packet;
    uint16_t _seq = 0;
    bool _sent_in_burst = false;

    std::thread _thread;
    std::mutex _wake_mutex;
    std::condition_variable _wake_cv;
    bool _wake_pending = false;
    std::atomic<bool> _stop{false};
};

// The inverse bridge: owns a CHDR endpoint and unpacks arriving Data packets
// into a unit's input stream, preserving burst boundaries.
class CrossbarIngress {
public:
    CrossbarIngress(uint8_t endpoint_id, std::shared_ptr<StreamBuffer> destination,
                    size_t queue_capacity = 64);
    ~CrossbarIngress();

    std::shared_ptr<ChdrEndpoint> endpoint() { return _endpoint; }

    void start();
    void stop();

private:
    void run();

    std::shared_ptr<ChdrEndpoint> _endpoint;
    std::shared_ptr<StreamBuffer> _destination;
    std::thread _thread;
};

} // namespace sdrp
