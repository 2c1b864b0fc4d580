// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/crossbar.hpp"

#include "sdrp/sample.hpp"

namespace sdrp {

// ---- EventBus ---------------------------------------------------------------

uint64_t EventBus::subscribe(Handler handler) {
    std::lock_guard lock(_mutex);
    const uint64_t id = _next_id++;
    _handlers[id] = std::move(handler);
    return id;
}

void EventBus::unsubscribe(uint64_t id) {
    std::lock_guard lock(_mutex);
    _handlers.erase(id);
}

void EventBus::emit(std::string type, std::map<std::string, std::string> fields) {
    std::vector<Handler> handlers;
    Event event;
    {
        std::lock_guard lock(_mutex);
        event.seq = _next_seq++;
        event.type = std::move(type);
        event.fields = std::move(fields);
        handlers.reserve(_handlers.size());
        for (const auto& [_, h] : _handlers) handlers.push_back(h);
    }
    for (const auto& h : handlers) h(event);
}

// ---- ChdrEndpoint -------------------------------------------------------------

ChdrEndpoint::ChdrEndpoint(uint8_t endpoint_id, size_t capacity)
    : _endpoint_id(endpoint_id), _capacity(capacity) {}

bool ChdrEndpoint::deliver(ChdrPacket&& packet) {
    std::function<void()> waker;
    {
        std::unique_lock lock(_mutex);
        _not_full.wait(lock, [this] { return _closed || _queue.size() < _capacity; });
        if (_closed) return false;
        _queue.push_back(std::move(packet));
        _not_empty.notify_all();
        waker = _waker;
    }
    if (waker) waker();
    return true;
}

std::optional<ChdrPacket> ChdrEndpoint::try_pop() {
    std::lock_guard lock(_mutex);
    if (_queue.empty()) return std::nullopt;
    ChdrPacket p = std::move(_queue.front());
    _queue.pop_front();
    _not_full.notify_all();
    return p;
}

std::optional<ChdrPacket> ChdrEndpoint::pop() {
    std::unique_lock lock(_mutex);
    _not_empty.wait(lock, [this] { return _closed || !_queue.empty(); });
    if (_queue.empty()) return std::nullopt;
    ChdrPacket p = std::move(_queue.front());
    _queue.pop_front();
    _not_full.notify_all();
    return p;
}

size_t ChdrEndpoint::queued() const {
    std::lock_guard lock(_mutex);
    return _queue.size();
}

void ChdrEndpoint::close() {
    {
        std::lock_guard lock(_mutex);
        _closed = true;
    }
    _not_full.notify_all();
    _not_empty.notify_all();
}

void ChdrEndpoint::set_waker(std::function<void()> waker) {
    std::lock_guard lock(_mutex);
    _waker = std::move(waker);
}

// ---- Crossbar -------------------------------------------------------------------

Crossbar::Crossbar(uint8_t local_device, EventBus* events)
    : _local_device(local_device), _events(events) {}

void Crossbar::add_route(uint8_t device, uint8_t endpoint, std::shared_ptr<PacketSink> target,
                         const std::string& label) {
    std::lock_guard lock(_mutex);
    auto key = std::make_pair(device, endpoint);
    if (_routes.count(key))
        raise(errc::duplicate_route, "(" + std::to_string(device) + ", " +
                                         std::to_string(endpoint) + ") already routed");
    _routes[key] = Target{std::move(target),
                          label.empty() ? "ep" + std::to_string(device) + ":" + std::to_string(endpoint)
                                        : label};
}

void Crossbar::add_device_route(uint8_t device, std::shared_ptr<PacketSink> target,
                                const std::string& label) {
    std::lock_guard lock(_mutex);
    if (_device_routes.count(device))
        raise(errc::duplicate_route, "device " + std::to_string(device) + " already routed");
    _device_routes[device] =
        Target{std::move(target), label.empty() ? "dev" + std::to_string(device) : label};
}

void Crossbar::remove_route(uint8_t device, uint8_t endpoint) {
    std::lock_guard lock(_mutex);
    _routes.erase(std::make_pair(device, endpoint));
}

void Crossbar::remove_device_route(uint8_t device) {
    std::lock_guard lock(_mutex);
    _device_routes.erase(device);
}

bool Crossbar::has_route(uint8_t device, uint8_t endpoint) const {
    std::lock_guard lock(_mutex);
    return _routes.count(std::make_pair(device, endpoint)) != 0 ||
           _device_routes.count(device) != 0;
}

void Crossbar::route(ChdrPacket&& packet) {
    Target target;
    {
        std::lock_guard lock(_mutex);
        _stats.packets_in++;
        const StreamId& sid = packet.header.sid;
        auto it = _routes.find(std::make_pair(sid.dst_device, sid.dst_endpoint));
        if (it != _routes.end()) {
            target = it->second;
        } else {
            auto dev = _device_routes.find(sid.dst_device);
            if (dev != _device_routes.end()) target = dev->second;
        }
        if (!target.sink) _stats.packets_dropped++;
    }

    if (!target.sink) {
        if (_events)
            _events->emit("drop", {{"reason", "NoRoute"}, {"sid", to_string(packet.header.sid)}});
        return;
    }

    const size_t bytes = packet.header.length_bytes;
    const bool ok = target.sink->deliver(std::move(packet));

    {
        std::lock_guard lock(_mutex);
        auto& port = _stats.per_target[target.label];
        if (ok) {
            _stats.packets_delivered++;
            port.packets++;
            port.bytes += bytes;
        } else {
            _stats.packets_dropped++;
            port.drops++;
        }
    }
    if (!ok && _events)
        _events->emit("drop", {{"reason", "LinkDown"}, {"target", target.label}});
}

CrossbarStats Crossbar::stats() const {
    std::lock_guard lock(_mutex);
    return _stats;
}

uint8_t Crossbar::allocate_endpoint_id() {
    std::lock_guard lock(_mutex);
    for (int tries = 0; tries < 256; tries++) {
        const uint8_t candidate = _next_endpoint++;
        if (_next_endpoint == 0) _next_endpoint = 1;
        if (candidate != 0 && !_routes.count(std::make_pair(_local_device, candidate)))
            return candidate;
    }
    raise(errc::invalid_argument, "no free endpoint ids on device " +
                                      std::to_string(_local_device));
}

// ---- SharedUnitWrapper ---------------------------------------------------------

SharedUnitWrapper::SharedUnitWrapper(Crossbar& crossbar, std::shared_ptr<UnitInstance> unit,
                                     uint8_t endpoint_id, size_t queue_capacity, size_t mtu)
    : _crossbar(crossbar), _unit(std::move(unit)),
      _endpoint(std::make_shared<ChdrEndpoint>(endpoint_id, queue_capacity)), _mtu(mtu) {}

SharedUnitWrapper::~SharedUnitWrapper() {
    stop();
}

void SharedUnitWrapper::set_return_route(const StreamId& source, const StreamId& reply_to) {
    std::lock_guard lock(_mutex);
    _return_map[pack_sid(source)] = reply_to;
}

void SharedUnitWrapper::start() {
    if (_thread.joinable()) return;
    _stop.store(false);
    _thread = std::thread([this] { pump(); });
}

void SharedUnitWrapper::stop() {
    _stop.store(true);
    _endpoint->close();
    if (_thread.joinable()) _thread.join();
}

void SharedUnitWrapper::pump() {
    while (!_stop.load()) {
        auto packet = _endpoint->pop();
        if (!packet) return; // closed
        switch (packet->header.packet_type) {
        case PacketType::command: handle_command(*packet); break;
        case PacketType::data: handle_data(*packet); break;
        default:
            // flow-control/response traffic is not meaningful here; type
            // tagging only
            break;
        }
    }
}

void SharedUnitWrapper::handle_command(const ChdrPacket& packet) {
    const StreamId reply_to = swap_sid(packet.header.sid);
    if (packet.payload.size() % 8 != 0 || packet.payload.empty()) {
        send_error_response(reply_to, status_malformed);
        return;
    }
    // Commit writes at a burst boundary only: commands act between bursts by
    // construction since the pump is single-threaded.
    Bytes payload;
    for (size_t at = 0; at < packet.payload.size(); at += 8) {
        const uint32_t offset = get_be32(packet.payload.data() + at);
        const uint32_t value = get_be32(packet.payload.data() + at + 4);
        uint32_t status = status_ok;
        try {
            _unit->regs().write(offset, value);
        } catch (const Error& e) {
            status = e.code() == errc::unknown_offset ? status_unknown_offset : status_out_of_range;
        }
        append_be32(payload, offset);
        append_be32(payload, status);
    }
    _unit->regs().commit();
    _unit->block().on_params(_unit->regs().committed());

    uint16_t& seq = _tx_seq[pack_sid(reply_to)];
    ChdrPacket response = ChdrPacket::make(PacketType::response, reply_to, std::move(payload), seq);
    seq = next_seq(seq);
    _crossbar.route(std::move(response));
}

void SharedUnitWrapper::handle_data(const ChdrPacket& packet) {
    const StreamId& from = packet.header.sid;
    if (packet.payload.size() % sample_wire_bytes != 0) {
        send_error_response(swap_sid(from), status_malformed);
        return;
    }
    Accum& acc = _accum[pack_sid(from)];
    acc.items.insert(acc.items.end(), packet.payload.begin(), packet.payload.end());
    acc.count += packet.payload.size() / sample_wire_bytes;

    // Burst-granular multiplexing: a burst runs through the unit only once
    // its end_of_burst packet has arrived, so flows never interleave inside
    // a burst.
    if (packet.header.end_of_burst) process_and_reply(from);
}

void SharedUnitWrapper::process_and_reply(const StreamId& from) {
    Accum acc = std::move(_accum[pack_sid(from)]);
    _accum.erase(pack_sid(from));

    std::vector<Sample> in = decode_samples(acc.items);
    Bytes raw(reinterpret_cast<const uint8_t*>(in.data()),
              reinterpret_cast<const uint8_t*>(in.data()) + in.size() * sizeof(Sample));

    // Commit any pending parametric writes before the burst.
    if (_unit->regs().commit()) _unit->block().on_params(_unit->regs().committed());

    FrameIo io(&raw, in.size(), BurstMeta{}, 1, &_unit->descriptor());
    Block& block = _unit->block();
    if (block.mode() == StepMode::framed) {
        block.process_burst(io);
    } else {
        // Windowed unit shared through the switch: feed whole windows.
        const uint32_t win_in = block.window_in(0);
        const uint32_t win_out = block.window_out(0);
        const size_t windows = win_in ? in.size() / win_in : 0;
        Bytes out(windows * win_out * sizeof(Sample));
        if (windows > 0) {
            std::vector<std::pair<const uint8_t*, size_t>> ins{
                {raw.data(), windows * win_in * sizeof(Sample)}};
            std::vector<std::pair<uint8_t*, size_t>> outs{{out.data(), out.size()}};
            WindowIo wio(std::move(ins), std::move(outs));
            block.process_windows(wio, windows);
        }
        block.on_burst_end();
        io.put_octets(0, out);
    }
    _bursts.fetch_add(1);

    StreamId reply_to = swap_sid(from);
    {
        std::lock_guard lock(_mutex);
        auto it = _return_map.find(pack_sid(from));
        if (it != _return_map.end()) reply_to = it->second;
    }

    // Reframe: split into MTU-sized Data packets, end_of_burst on the last.
    std::span<const Sample> out_samples;
    std::vector<Sample> out_vec;
    if (io.wrote(0)) {
        const Bytes& out_bytes = io.out_raw(0);
        out_vec.assign(reinterpret_cast<const Sample*>(out_bytes.data()),
                       reinterpret_cast<const Sample*>(out_bytes.data()) +
                           out_bytes.size() / sizeof(Sample));
        out_samples = out_vec;
    }

    const size_t per_packet = std::max<size_t>(1, _mtu / sample_wire_bytes);
    uint16_t& seq = _tx_seq[pack_sid(reply_to)];
    size_t at = 0;
    do {
        const size_t n = std::min(per_packet, out_samples.size() - at);
        Bytes payload = encode_samples(out_samples.subspan(at, n));
        at += n;
        const bool last = at >= out_samples.size();
        ChdrPacket p = ChdrPacket::make(PacketType::data, reply_to, std::move(payload), seq, last);
        seq = next_seq(seq);
        _crossbar.route(std::move(p));
    } while (at < out_samples.size());
}

void SharedUnitWrapper::send_error_response(const StreamId& to, uint32_t status) {
    Bytes payload;
    append_be32(payload, 0xffffffffu);
    append_be32(payload, status);
    uint16_t& seq = _tx_seq[pack_sid(to)];
    ChdrPacket response = ChdrPacket::make(PacketType::response, to, std::move(payload), seq);
    seq = next_seq(seq);
    _crossbar.route(std::move(response));
}

// ---- CrossbarEgress -------------------------------------------------------------

CrossbarEgress::CrossbarEgress(Crossbar& crossbar, std::shared_ptr<StreamBuffer> source,
                               StreamId flow_sid, size_t mtu)
    : _crossbar(crossbar), _source(std::move(source)), _sid(flow_sid),
      _per_packet(std::max<size_t>(1, mtu / sample_wire_bytes)) {
    _source->set_consumer_waker([this] {
        {
            std::lock_guard lock(_wake_mutex);
            _wake_pending = true;
        }
        _wake_cv.notify_all();
    });
}

CrossbarEgress::~CrossbarEgress() {
    stop();
}

void CrossbarEgress::start() {
    if (_thread.joinable()) return;
    _thread = std::thread([this] { run(); });
}

void CrossbarEgress::stop() {
    _stop.store(true);
    _wake_cv.notify_all();
    if (_thread.joinable()) _thread.join();
}

void CrossbarEgress::emit(std::span<const Sample> samples, bool end_of_burst) {
    ChdrPacket packet =
        ChdrPacket::make(PacketType::data, _sid, encode_samples(samples), _seq, end_of_burst);
    _seq = next_seq(_seq);
    _crossbar.route(std::move(packet));
}

void CrossbarEgress::run() {
    using namespace std::chrono_literals;
    std::vector<Sample> chunk(_per_packet);
    while (!_stop.load()) {
        const auto tag = _source->peek_tag();
        const uint64_t to_boundary =
            tag ? tag->end_index - _source->read_index() : uint64_t(-1);
        const size_t avail = std::min<uint64_t>(_source->size(), to_boundary);

        if (avail > 0) {
            const size_t n = std::min(avail, _per_packet);
            _source->try_pop(chunk.data(), n);
            const bool eob = (uint64_t(n) == to_boundary);
            emit(std::span<const Sample>(chunk.data(), n), eob);
            if (eob) {
                _source->pop_tag();
                _sent_in_burst = false;
            } else {
                _sent_in_burst = true;
            }
            continue;
        }
        if (to_boundary == 0) { // boundary with nothing pending: empty burst end
            _source->pop_tag();
            emit({}, true);
            _sent_in_burst = false;
            continue;
        }
        if (_source->exhausted()) {
            if (_sent_in_burst) emit({}, true); // close the trailing burst
            return;
        }
        std::unique_lock lock(_wake_mutex);
        _wake_cv.wait_for(lock, 200us, [this] { return _wake_pending || _stop.load(); });
        _wake_pending = false;
    }
}

// ---- CrossbarIngress -------------------------------------------------------------

CrossbarIngress::CrossbarIngress(uint8_t endpoint_id, std::shared_ptr<StreamBuffer> destination,
                                 size_t queue_capacity)
    : _endpoint(std::make_shared<ChdrEndpoint>(endpoint_id, queue_capacity)),
      _destination(std::move(destination)) {}

CrossbarIngress::~CrossbarIngress() {
    stop();
}

void CrossbarIngress::start() {
    if (_thread.joinable()) return;
    _thread = std::thread([this] { run(); });
}

void CrossbarIngress::stop() {
    _endpoint->close();
    if (_thread.joinable()) _thread.join();
}

void CrossbarIngress::run() {
    while (true) {
        auto packet = _endpoint->pop();
        if (!packet) break; // endpoint closed
        if (packet->header.packet_type != PacketType::data) continue;
        std::vector<Sample> samples = decode_samples(packet->payload);
        if (!samples.empty()) _destination->push(samples.data(), samples.size());
        if (packet->header.end_of_burst) _destination->mark_burst_end();
    }
    _destination->close();
}

} // namespace sdrp
