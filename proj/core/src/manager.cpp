// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/manager.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <thread>

namespace sdrp {

using namespace std::chrono;

double fronthaul_rate(uint64_t antennas, double sample_rate_sps, uint64_t bits_per_component) {
    if (antennas == 0 || bits_per_component == 0 || !(sample_rate_sps > 0))
        raise(errc::invalid_argument, "antennas, sample rate and bit width must be positive");
    return double(antennas) * sample_rate_sps * 2.0 * double(bits_per_component);
}

std::string AdmissionReport::render() const {
    std::ostringstream out;
    out << "resource:   cells " << cells_demanded << "/" << cells_available << ", dsp "
        << dsp_demanded << "/" << dsp_available << " -> " << (resource_ok ? "ok" : "FAIL")
        << "\n";
    out << "throughput: ";
    if (throughput.empty()) out << "(no units)";
    for (const auto& item : throughput)
        out << item.unit << " " << item.demanded_sps << "/" << item.available_sps << " sps "
            << (item.ok ? "ok" : "FAIL") << "; ";
    out << "-> " << (throughput_ok ? "ok" : "FAIL") << "\n";
    out << "latency:    ";
    if (latency_budget_set)
        out << latency_path_s * 1e6 << " us / budget " << latency_budget_s * 1e6 << " us -> "
            << (latency_ok ? "ok" : "FAIL");
    else
        out << "no budget -> ok";
    out << "\n";
    for (const auto& note : notes) out << "note: " << note << "\n";
    return out.str();
}

ChainManager::ChainManager(Catalog& catalog, const PlatformModel& platform,
                           std::vector<PrrConfig> prrs, Crossbar& crossbar, EventBus* events,
                           BlockEnv env, Config config)
    : _catalog(catalog), _crossbar(crossbar), _events(events), _env(env), _config(config),
      _budget(platform, prrs) {}

ChainManager::~ChainManager() {
    std::vector<ChainId> ids;
    {
        std::lock_guard lock(_mutex);
        for (const auto& [id, _] : _chains) ids.push_back(id);
    }
    for (ChainId id : ids) {
        try {
            teardown(id);
        } catch (...) {
        }
    }
}

void ChainManager::set_remote_peers(RemotePeerOps ops) {
    std::lock_guard lock(_mutex);
    _peers = std::move(ops);
}

// ---- demand propagation -----------------------------------------------------

std::map<std::string, double> ChainManager::unit_demands(const ChainGraph& graph) const {
    const ChainSpec& spec = graph.spec;
    const size_t n = spec.units.size();

    std::vector<std::map<uint32_t, double>> in_rates(n);
    std::vector<double> out_rate_per_port(n, 0.0);
    std::vector<int> pending(n, 0);
    std::vector<std::vector<size_t>> out_links(n);
    for (size_t l = 0; l < spec.links.size(); l++) {
        const int dst = graph.unit_index(spec.links[l].dst.unit);
        pending[dst]++;
        out_links[graph.unit_index(spec.links[l].src.unit)].push_back(l);
    }

    std::map<std::string, double> demands;
    std::deque<size_t> ready;
    for (size_t i = 0; i < n; i++)
        if (pending[i] == 0) ready.push_back(i);

    size_t processed = 0;
    auto visit = [&](size_t i) {
        const UnitDescriptor& d = graph.descriptors[i];
        double demand;
        if (d.n_inputs == 0) {
            demand = spec.units[i].source_rate_sps.value_or(spec.sample_rate_sps);
        } else {
            demand = 0;
            for (const auto& [_, r] : in_rates[i]) demand += r;
        }
        demands[spec.units[i].name] = demand;

        double steps;
        if (d.n_inputs == 0)
            steps = demand;
        else
            steps = demand / double(std::max<uint32_t>(1, d.n_inputs) *
                                    std::max<uint32_t>(1, d.samples_in_per_step));
        out_rate_per_port[i] =
            d.n_inputs == 0 ? demand : steps * double(std::max<uint32_t>(1, d.samples_out_per_step));

        for (size_t l : out_links[i]) {
            const int dst = graph.unit_index(spec.links[l].dst.unit);
            in_rates[dst][spec.links[l].dst.port] = out_rate_per_port[i];
            if (--pending[dst] == 0) ready.push_back(size_t(dst));
        }
        processed++;
    };

    while (!ready.empty()) {
        const size_t i = ready.front();
        ready.pop_front();
        visit(i);
    }
    if (processed < n) {
        // feedback through the crossbar: fall back to declaration order for
        // the remaining units
        for (size_t i = 0; i < n; i++)
            if (!demands.count(spec.units[i].name)) visit(i);
    }
    return demands;
}

// ---- validation ---------------------------------------------------------------

AdmissionReport ChainManager::validate_locked(
    const ChainGraph& graph, const ResourceBudget& budget,
    const std::map<std::string, SharedRt>& shared,
    const std::map<std::string, ChainId>& prr_occupancy) const {
    AdmissionReport report;
    const ChainSpec& spec = graph.spec;
    const uint8_t local = _crossbar.local_device();
    const PlatformModel& platform = budget.platform();

    // resource check
    std::map<std::string, std::pair<uint64_t, uint64_t>> prr_demand;
    size_t remote_units = 0;
    for (size_t i = 0; i < spec.units.size(); i++) {
        const UnitSpec& u = spec.units[i];
        const UnitDescriptor& d = graph.descriptors[i];
        if (graph.is_remote(i, local)) {
            remote_units++;
            continue; // budgeted on its own node during reserve
        }
        if (u.share) {
            auto it = shared.find(*u.share);
            if (it != shared.end()) {
                if (it->second.kind != u.kind) {
                    report.notes.push_back("shared unit '" + *u.share + "' exists with kind " +
                                           it->second.kind + ", requested " + u.kind);
                    report.resource_ok = false;
                }
                continue; // already paid for
            }
            report.cells_demanded += d.cost_logic_cells;
            report.dsp_demanded += d.cost_dsp_slices;
            continue;
        }
        if (u.prr) {
            auto& dem = prr_demand[*u.prr];
            dem.first += d.cost_logic_cells;
            dem.second += d.cost_dsp_slices;
            continue;
        }
        report.cells_demanded += d.cost_logic_cells;
        report.dsp_demanded += d.cost_dsp_slices;
    }
    report.cells_available = budget.cells_free();
    report.dsp_available = budget.dsp_free();
    if (report.cells_demanded > report.cells_available ||
        report.dsp_demanded > report.dsp_available)
        report.resource_ok = false;
    for (const auto& [prr_id, demand] : prr_demand) {
        const PrrConfig* prr = budget.find_prr(prr_id);
        if (!prr) {
            report.notes.push_back("unknown PRR '" + prr_id + "'");
            report.resource_ok = false;
            continue;
        }
        auto occupied = prr_occupancy.find(prr_id);
        if (occupied != prr_occupancy.end()) {
            report.notes.push_back("PRR '" + prr_id + "' already occupied by chain " +
                                   std::to_string(occupied->second));
            report.resource_ok = false;
        }
        if (demand.first > prr->size_logic_cells || demand.second > prr->size_dsp_slices) {
            report.notes.push_back("occupant needs " + std::to_string(demand.first) + " cells / " +
                                   std::to_string(demand.second) + " DSP, PRR '" + prr_id +
                                   "' offers " + std::to_string(prr->size_logic_cells) + "/" +
                                   std::to_string(prr->size_dsp_slices));
            report.resource_ok = false;
        }
    }
    if (remote_units > 0)
        report.notes.push_back(std::to_string(remote_units) +
                               " remote unit(s): budget checked on their node at reserve time");

    // throughput check
    const auto demands = unit_demands(graph);
    for (size_t i = 0; i < spec.units.size(); i++) {
        const UnitSpec& u = spec.units[i];
        if (graph.is_remote(i, local)) continue;
        const UnitDescriptor& d = graph.descriptors[i];
        const double clock = u.clock_hz > 0 ? u.clock_hz : platform.fabric_clock_hz;

        ThroughputCheckItem item;
        item.unit = u.name;
        double demand = demands.count(u.name) ? demands.at(u.name) : 0.0;
        double existing = 0;
        if (u.share) {
            auto it = shared.find(*u.share);
            if (it != shared.end()) existing = it->second.demand_sps;
        }
        item.demanded_sps = demand + existing;
        double cap = d.throughput_sps;
        if (d.n_outputs > 0 && d.samples_out_per_step > 0)
            cap = std::min(cap, double(d.samples_out_per_step) * clock /
                                    double(std::max<uint32_t>(1, d.cycles_per_step)));
        item.available_sps = cap;
        item.ok = item.demanded_sps <= item.available_sps;
        if (clock > platform.fabric_clock_hz) {
            item.ok = false;
            report.notes.push_back(u.name + ": clock " + std::to_string(clock) +
                                   " Hz exceeds fabric maximum");
        }
        if (!item.ok) report.throughput_ok = false;
        report.throughput.push_back(item);
    }

    // latency check: critical path of unit latencies plus crossbar hops
    if (spec.latency_budget_s) {
        report.latency_budget_set = true;
        report.latency_budget_s = *spec.latency_budget_s;

        const size_t n = spec.units.size();
        std::vector<std::vector<std::pair<int, double>>> adj(n); // (next, edge delay)
        for (const auto& link : spec.links) {
            const int src = graph.unit_index(link.src.unit);
            const int dst = graph.unit_index(link.dst.unit);
            double hop = 0;
            if (link.via == LinkVia::crossbar) {
                hop = _config.crossbar_hop_latency_s;
                const uint8_t sn = spec.units[src].node.value_or(local);
                const uint8_t dn = spec.units[dst].node.value_or(local);
                if (sn != dn) hop *= 2; // both switches on a cross-node hop
            }
            adj[src].push_back({dst, hop});
        }
        std::vector<double> weight(n);
        for (size_t i = 0; i < n; i++) {
            const double clock =
                spec.units[i].clock_hz > 0 ? spec.units[i].clock_hz : platform.fabric_clock_hz;
            weight[i] = double(graph.descriptors[i].latency_cycles) / clock;
        }
        std::vector<int> state(n, 0);
        std::vector<double> best(n, -1.0);
        bool cyclic = false;
        std::function<double(int)> longest = [&](int at) -> double {
            if (state[at] == 1) {
                cyclic = true;
                return 0;
            }
            if (best[at] >= 0) return best[at];
            state[at] = 1;
            double tail = 0;
            for (const auto& [next, hop] : adj[at])
                tail = std::max(tail, hop + longest(next));
            state[at] = 2;
            best[at] = weight[at] + tail;
            return best[at];
        };
        double path = 0;
        for (size_t i = 0; i < n; i++) path = std::max(path, longest(int(i)));
        report.latency_path_s = path;
        if (cyclic) {
            report.notes.push_back("feedback loop via crossbar: latency unbounded");
            report.latency_ok = false;
        } else {
            report.latency_ok = path <= *spec.latency_budget_s;
        }
    }

    return report;
}

AdmissionReport ChainManager::validate(const ChainGraph& graph) const {
    std::lock_guard lock(_mutex);
    return validate_locked(graph, _budget, _shared, _prr_occupancy);
}

// ---- deployment ----------------------------------------------------------------

namespace {

struct LinkEnds {
    enum class Kind { local, shared, remote };
    Kind src;
    Kind dst;
};

} // namespace

void ChainManager::instantiate(ChainRt& chain) {
    const ChainGraph& graph = chain.graph;
    const ChainSpec& spec = graph.spec;
    const uint8_t local = _crossbar.local_device();

    auto kind_of = [&](size_t i) {
        if (graph.is_remote(i, local)) return LinkEnds::Kind::remote;
        if (spec.units[i].share) return LinkEnds::Kind::shared;
        return LinkEnds::Kind::local;
    };

    // Every declared port must be linked, except on the subchains produced by
    // distributed deploys (their boundary ports are wired by the origin).
    if (!chain.is_subchain) {
        std::set<std::pair<std::string, uint32_t>> linked_in, linked_out;
        for (const auto& link : spec.links) {
            linked_in.insert({link.dst.unit, link.dst.port});
            linked_out.insert({link.src.unit, link.src.port});
        }
        for (size_t i = 0; i < spec.units.size(); i++) {
            const auto& d = graph.descriptors[i];
            for (uint32_t p = 0; p < d.n_inputs; p++)
                if (!linked_in.count({spec.units[i].name, p}))
                    raise(errc::dangling_port, spec.units[i].name + ".in" + std::to_string(p) +
                                                   " is not linked");
            for (uint32_t p = 0; p < d.n_outputs; p++)
                if (!linked_out.count({spec.units[i].name, p}))
                    raise(errc::dangling_port, spec.units[i].name + ".out" + std::to_string(p) +
                                                   " is not linked");
        }
    }

    // Remote grouping: desk-scale supports one peer node per chain.
    std::set<uint8_t> remote_devices;
    for (size_t i = 0; i < spec.units.size(); i++)
        if (graph.is_remote(i, local)) remote_devices.insert(*spec.units[i].node);
    if (remote_devices.size() > 1)
        raise(errc::invalid_argument, "chains spanning more than two nodes are not supported");
    if (!remote_devices.empty() && !_peers.reserve)
        raise(errc::invalid_argument, "no peer control endpoint configured for remote deploys");

    // Local unit instances.
    for (size_t i = 0; i < spec.units.size(); i++) {
        const UnitSpec& u = spec.units[i];
        if (kind_of(i) != LinkEnds::Kind::local) continue;
        const double clock =
            u.clock_hz > 0 ? u.clock_hz : _budget.platform().fabric_clock_hz;
        auto unit = create_unit(_catalog, u.kind, u.params, _env, u.name,
                                "clk_" + u.name, clock);
        chain.units[u.name] =
            std::make_unique<DeployedUnit>(std::move(unit), _config.batch_items);
    }

    // Shared units: bind or create the wrapped instance.
    for (size_t i = 0; i < spec.units.size(); i++) {
        const UnitSpec& u = spec.units[i];
        if (kind_of(i) != LinkEnds::Kind::shared) continue;
        auto it = _shared.find(*u.share);
        if (it == _shared.end()) {
            const double clock =
                u.clock_hz > 0 ? u.clock_hz : _budget.platform().fabric_clock_hz;
            auto unit = create_unit(_catalog, u.kind, u.params, _env, *u.share,
                                    "clk_" + *u.share, clock);
            SharedRt rt;
            rt.kind = u.kind;
            rt.cells = graph.descriptors[i].cost_logic_cells;
            rt.dsp = graph.descriptors[i].cost_dsp_slices;
            rt.endpoint_id = _crossbar.allocate_endpoint_id();
            rt.wrapper = std::make_shared<SharedUnitWrapper>(_crossbar, std::move(unit),
                                                             rt.endpoint_id, 64, _config.mtu);
            _crossbar.add_route(local, rt.endpoint_id, rt.wrapper->endpoint(),
                                "shared:" + *u.share);
            rt.wrapper->start();
            it = _shared.emplace(*u.share, std::move(rt)).first;
        } else if (it->second.kind != u.kind) {
            raise(errc::invalid_argument, "shared unit '" + *u.share + "' exists with kind '" +
                                              it->second.kind + "'");
        }
    }

    // Remote reservation (two-phase: reserve now, commit at start).
    SubchainReservation reservation;
    std::vector<size_t> boundary_in_links; // link indices local->remote
    if (!remote_devices.empty()) {
        const uint8_t device = *remote_devices.begin();
        SubchainRequest request;
        request.name = spec.name + "@" + std::to_string(device);
        request.sample_rate_sps = spec.sample_rate_sps;
        for (size_t i = 0; i < spec.units.size(); i++) {
            if (!graph.is_remote(i, local)) continue;
            UnitSpec u = spec.units[i];
            u.node.reset();
            request.units.push_back(std::move(u));
        }
        for (size_t l = 0; l < spec.links.size(); l++) {
            const auto& link = spec.links[l];
            const bool src_remote = graph.is_remote(size_t(graph.unit_index(link.src.unit)), local);
            const bool dst_remote = graph.is_remote(size_t(graph.unit_index(link.dst.unit)), local);
            if (src_remote && dst_remote) {
                request.links.push_back(link);
            } else if (!src_remote && dst_remote) {
                request.inputs.push_back(BoundaryInput{link.dst.unit, link.dst.port});
                boundary_in_links.push_back(l);
            } else if (src_remote && !dst_remote) {
                // Remote egress lands on a local ingress endpoint.
                const int dst = graph.unit_index(link.dst.unit);
                if (kind_of(size_t(dst)) != LinkEnds::Kind::local)
                    raise(errc::invalid_argument,
                          "remote units may only feed plain local units");
                auto buffer = std::make_shared<StreamBuffer>(link.capacity, ItemKind::sample);
                const uint8_t ep = _crossbar.allocate_endpoint_id();
                auto ingress = std::make_shared<CrossbarIngress>(ep, buffer);
                _crossbar.add_route(local, ep, ingress->endpoint(),
                                    "ingress:" + link.dst.unit);
                chain.owned_endpoints.push_back(ep);
                chain.ingresses.push_back(ingress);
                chain.buffers.push_back(buffer);
                chain.units.at(link.dst.unit)->bind_input(link.dst.port, buffer);
                request.outputs.push_back(
                    BoundaryOutput{link.src.unit, link.src.port, StreamId{0, 0, local, ep}});
            }
        }
        reservation = _peers.reserve(device, request);
        chain.remote_holds[device] = reservation.handle;
    }

    // Wire the links.
    size_t boundary_cursor = 0;
    for (size_t l = 0; l < spec.links.size(); l++) {
        const auto& link = spec.links[l];
        const size_t src = size_t(graph.unit_index(link.src.unit));
        const size_t dst = size_t(graph.unit_index(link.dst.unit));
        const LinkEnds ends{kind_of(src), kind_of(dst)};

        if (ends.src == LinkEnds::Kind::local && ends.dst == LinkEnds::Kind::local) {
            const ItemKind kind = graph.descriptors[src].output_kind(link.src.port);
            if (link.via == LinkVia::direct) {
                auto buffer = std::make_shared<StreamBuffer>(link.capacity, kind);
                chain.buffers.push_back(buffer);
                chain.units.at(link.src.unit)->bind_output(link.src.port, buffer);
                chain.units.at(link.dst.unit)->bind_input(link.dst.port, buffer);
            } else {
                // local loop through the switch
                auto in_buffer = std::make_shared<StreamBuffer>(link.capacity, kind);
                const uint8_t ep = _crossbar.allocate_endpoint_id();
                auto ingress = std::make_shared<CrossbarIngress>(ep, in_buffer);
                _crossbar.add_route(local, ep, ingress->endpoint(), "ingress:" + link.dst.unit);
                chain.owned_endpoints.push_back(ep);
                chain.ingresses.push_back(ingress);
                chain.buffers.push_back(in_buffer);
                chain.units.at(link.dst.unit)->bind_input(link.dst.port, in_buffer);

                auto out_buffer = std::make_shared<StreamBuffer>(link.capacity, kind);
                chain.buffers.push_back(out_buffer);
                chain.units.at(link.src.unit)->bind_output(link.src.port, out_buffer);
                const uint8_t flow = _crossbar.allocate_endpoint_id();
                chain.owned_endpoints.push_back(flow);
                chain.egresses.push_back(std::make_unique<CrossbarEgress>(
                    _crossbar, out_buffer, StreamId{local, flow, local, ep}, _config.mtu));
            }
        } else if (ends.src == LinkEnds::Kind::local && ends.dst == LinkEnds::Kind::shared) {
            // handled together with the shared unit's outgoing link below
        } else if (ends.src == LinkEnds::Kind::shared && ends.dst == LinkEnds::Kind::local) {
            // handled below
        } else if (ends.src == LinkEnds::Kind::local && ends.dst == LinkEnds::Kind::remote) {
            auto buffer = std::make_shared<StreamBuffer>(link.capacity, ItemKind::sample);
            chain.buffers.push_back(buffer);
            chain.units.at(link.src.unit)->bind_output(link.src.port, buffer);
            const uint8_t flow = _crossbar.allocate_endpoint_id();
            chain.owned_endpoints.push_back(flow);
            const StreamId to = reservation.input_sids.at(boundary_cursor++);
            chain.egresses.push_back(std::make_unique<CrossbarEgress>(
                _crossbar, buffer,
                StreamId{local, flow, to.dst_device, to.dst_endpoint}, _config.mtu));
        } else if (ends.src == LinkEnds::Kind::remote) {
            // wired during the reservation pass
        } else {
            raise(errc::invalid_argument, "unsupported link topology on " + link.src.unit +
                                              " -> " + link.dst.unit);
        }
    }

    // Shared units: u -> S -> v becomes an egress to S's endpoint plus a
    // return route back to v's ingress.
    for (size_t i = 0; i < spec.units.size(); i++) {
        if (kind_of(i) != LinkEnds::Kind::shared) continue;
        const UnitSpec& su = spec.units[i];
        const LinkSpec* in_link = nullptr;
        const LinkSpec* out_link = nullptr;
        for (const auto& link : spec.links) {
            if (link.dst.unit == su.name) in_link = &link;
            if (link.src.unit == su.name) out_link = &link;
        }
        if (!in_link || !out_link)
            raise(errc::invalid_argument, "shared unit '" + su.name +
                                              "' needs exactly one inbound and one outbound link");
        const size_t up = size_t(graph.unit_index(in_link->src.unit));
        const size_t down = size_t(graph.unit_index(out_link->dst.unit));
        if (kind_of(up) != LinkEnds::Kind::local || kind_of(down) != LinkEnds::Kind::local)
            raise(errc::invalid_argument, "shared units must neighbor local units");

        SharedRt& shared = _shared.at(*su.share);

        auto in_buffer = std::make_shared<StreamBuffer>(out_link->capacity, ItemKind::sample);
        const uint8_t ep_return = _crossbar.allocate_endpoint_id();
        auto ingress = std::make_shared<CrossbarIngress>(ep_return, in_buffer);
        _crossbar.add_route(local, ep_return, ingress->endpoint(),
                            "ingress:" + out_link->dst.unit);
        chain.owned_endpoints.push_back(ep_return);
        chain.ingresses.push_back(ingress);
        chain.buffers.push_back(in_buffer);
        chain.units.at(out_link->dst.unit)->bind_input(out_link->dst.port, in_buffer);

        auto out_buffer = std::make_shared<StreamBuffer>(in_link->capacity, ItemKind::sample);
        chain.buffers.push_back(out_buffer);
        chain.units.at(in_link->src.unit)->bind_output(in_link->src.port, out_buffer);
        const uint8_t flow = _crossbar.allocate_endpoint_id();
        chain.owned_endpoints.push_back(flow);
        const StreamId flow_sid{local, flow, local, shared.endpoint_id};
        chain.egresses.push_back(
            std::make_unique<CrossbarEgress>(_crossbar, out_buffer, flow_sid, _config.mtu));
        shared.wrapper->set_return_route(
            flow_sid, StreamId{local, shared.endpoint_id, local, ep_return});
    }
}

void ChainManager::start_chain(ChainRt& chain) {
    for (auto& ingress : chain.ingresses) ingress->start();
    for (auto& [_, unit] : chain.units) unit->start();
    for (auto& egress : chain.egresses) egress->start();
    chain.state = "running";
}

void ChainManager::unwind(ChainRt& chain) {
    for (auto& egress : chain.egresses) egress->stop();
    for (auto& [_, unit] : chain.units) unit->request_stop();
    for (auto& buffer : chain.buffers) buffer->close();
    for (auto& ingress : chain.ingresses) ingress->stop();
    for (auto& [_, unit] : chain.units) unit->join();
    for (uint8_t ep : chain.owned_endpoints)
        _crossbar.remove_route(_crossbar.local_device(), ep);
    for (const auto& [device, handle] : chain.remote_holds) {
        try {
            if (_peers.release) _peers.release(device, handle);
        } catch (...) {
        }
    }
    chain.units.clear();
    chain.buffers.clear();
    chain.egresses.clear();
    chain.ingresses.clear();
}

ChainId ChainManager::deploy_locked(const ChainGraph& graph, AdmissionReport& report) {
    report = validate_locked(graph, _budget, _shared, _prr_occupancy);
    if (!report.admitted()) throw AdmissionError(report);

    ChainRt chain;
    chain.id = _next_id++;
    chain.graph = graph;
    chain.cells = report.cells_demanded;
    chain.dsp = report.dsp_demanded;

    try {
        instantiate(chain);
    } catch (...) {
        unwind(chain);
        throw;
    }

    // Side effects only after everything constructible succeeded.
    _budget.allocate(chain.cells, chain.dsp);

    const auto demands = unit_demands(graph);
    for (size_t i = 0; i < graph.spec.units.size(); i++) {
        const UnitSpec& u = graph.spec.units[i];
        if (!u.share) continue;
        const double d = demands.count(u.name) ? demands.at(u.name) : 0.0;
        auto& shared = _shared.at(*u.share);
        shared.demand_sps += d;
        shared.refcount++;
        chain.shared_demand[*u.share] += d;
    }
    for (size_t i = 0; i < graph.spec.units.size(); i++) {
        const UnitSpec& u = graph.spec.units[i];
        if (u.prr && !graph.is_remote(i, _crossbar.local_device())) {
            _prr_occupancy[*u.prr] = chain.id;
            chain.prr_units[*u.prr].push_back(u.name);
        }
    }

    for (const auto& [device, handle] : chain.remote_holds)
        if (_peers.commit) _peers.commit(device, handle);

    start_chain(chain);
    const ChainId id = chain.id;
    _chains.emplace(id, std::move(chain));
    if (_events)
        _events->emit("deploy", {{"chain", std::to_string(id)}, {"name", graph.spec.name}});
    return id;
}

DeployResult ChainManager::deploy(const ChainGraph& graph) {
    std::lock_guard lock(_mutex);
    DeployResult result;
    result.id = deploy_locked(graph, result.report);
    return result;
}

void ChainManager::teardown_locked(ChainId id, bool drain) {
    auto it = _chains.find(id);
    if (it == _chains.end()) raise(errc::unknown_chain, "chain " + std::to_string(id));
    ChainRt& chain = it->second;
    chain.state = "draining";

    // Stop originating new data, then let what is in flight flow out.
    for (auto& [_, unit] : chain.units)
        if (unit->unit().descriptor().n_inputs == 0) unit->finish_source();
    for (auto& ingress : chain.ingresses) ingress->stop();

    if (drain) {
        const auto deadline = steady_clock::now() + _config.teardown_timeout;
        while (steady_clock::now() < deadline) {
            bool all_done = true;
            for (auto& [_, unit] : chain.units)
                if (!unit->done()) all_done = false;
            if (all_done) break;
            std::this_thread::sleep_for(1ms);
        }
    }

    for (auto& [_, unit] : chain.units) unit->request_stop();
    for (auto& buffer : chain.buffers) buffer->close();
    for (auto& egress : chain.egresses) egress->stop();
    for (auto& [_, unit] : chain.units) unit->join();

    for (uint8_t ep : chain.owned_endpoints)
        _crossbar.remove_route(_crossbar.local_device(), ep);

    for (const auto& [device, handle] : chain.remote_holds) {
        try {
            if (_peers.release) _peers.release(device, handle);
        } catch (...) {
            // peer unreachable: resources on our side are still reclaimed
        }
    }

    for (const auto& [name, demand] : chain.shared_demand) {
        auto shared = _shared.find(name);
        if (shared == _shared.end()) continue;
        shared->second.demand_sps -= demand;
        if (--shared->second.refcount <= 0) {
            shared->second.wrapper->stop();
            _crossbar.remove_route(_crossbar.local_device(), shared->second.endpoint_id);
            _budget.release(shared->second.cells, shared->second.dsp);
            _shared.erase(shared);
        }
    }

    for (const auto& [prr_id, _] : chain.prr_units) _prr_occupancy.erase(prr_id);

    _budget.release(chain.cells, chain.dsp);
    _chains.erase(it);
    if (_events) _events->emit("teardown", {{"chain", std::to_string(id)}});
}

void ChainManager::teardown(ChainId id) {
    std::lock_guard lock(_mutex);
    teardown_locked(id, true);
}

// ---- parametric control ---------------------------------------------------------

void ChainManager::set_param(ChainId id, const std::string& unit, const std::string& reg,
                             uint32_t value) {
    std::unique_lock lock(_mutex);
    auto it = _chains.find(id);
    if (it == _chains.end()) raise(errc::unknown_chain, "chain " + std::to_string(id));
    ChainRt& chain = it->second;

    auto local = chain.units.find(unit);
    if (local != chain.units.end()) {
        local->second->unit().regs().write_named(reg, value);
        return;
    }
    const UnitSpec* spec = chain.graph.find_unit(unit);
    if (!spec) raise(errc::no_such_port, "chain has no unit '" + unit + "'");
    if (spec->share) {
        auto shared = _shared.find(*spec->share);
        if (shared == _shared.end()) raise(errc::no_such_port, "shared unit gone");
        shared->second.wrapper->unit().regs().write_named(reg, value);
        return;
    }
    if (spec->node && *spec->node != _crossbar.local_device()) {
        const uint8_t device = *spec->node;
        const uint64_t handle = chain.remote_holds.at(device);
        auto fn = _peers.set_param;
        lock.unlock();
        if (!fn) raise(errc::invalid_argument, "no peer ops for remote set-param");
        fn(device, handle, unit, reg, value);
        return;
    }
    raise(errc::no_such_port, "unit '" + unit + "' is not controllable here");
}

uint32_t ChainManager::get_param(ChainId id, const std::string& unit,
                                 const std::string& reg) const {
    std::lock_guard lock(_mutex);
    auto it = _chains.find(id);
    if (it == _chains.end()) raise(errc::unknown_chain, "chain " + std::to_string(id));
    const ChainRt& chain = it->second;
    auto local = chain.units.find(unit);
    if (local != chain.units.end()) return local->second->unit().regs().read_named(reg);
    const UnitSpec* spec = chain.graph.find_unit(unit);
    if (spec && spec->share) {
        auto shared = _shared.find(*spec->share);
        if (shared != _shared.end())
            return shared->second.wrapper->unit().regs().read_named(reg);
    }
    raise(errc::no_such_port, "unit '" + unit + "' is not readable here");
}

// ---- reconfiguration --------------------------------------------------------------

FullReconfigReport ChainManager::reconfigure_full(const std::vector<ChainGraph>& graphs,
                                                  uint64_t total_bitstream_bytes) {
    std::lock_guard lock(_mutex);

    // The incoming set must fit an empty fabric by itself.
    ResourceBudget fresh(_budget.platform(), std::vector<PrrConfig>(_budget.prrs()));
    std::map<std::string, SharedRt> fresh_shared;
    std::map<std::string, ChainId> fresh_prrs;
    for (const auto& graph : graphs) {
        AdmissionReport report = validate_locked(graph, fresh, fresh_shared, fresh_prrs);
        if (!report.admitted()) throw AdmissionError(report);
        fresh.allocate(report.cells_demanded, report.dsp_demanded);
        ChainId fake_id = ChainId(fresh_prrs.size() + 1);
        for (size_t i = 0; i < graph.spec.units.size(); i++) {
            const UnitSpec& u = graph.spec.units[i];
            if (u.prr) fresh_prrs[*u.prr] = fake_id;
            if (u.share && !fresh_shared.count(*u.share)) {
                SharedRt rt;
                rt.kind = u.kind;
                fresh_shared.emplace(*u.share, std::move(rt));
            }
        }
    }

    // Whole-PL reprogramming: every existing chain goes down, even ones that
    // would not have needed a change.
    std::vector<ChainId> old_ids;
    for (const auto& [id, _] : _chains) old_ids.push_back(id);
    for (ChainId id : old_ids) teardown_locked(id, false);

    FullReconfigReport report;
    report.downtime_s = double(total_bitstream_bytes) / _budget.platform().pcap_throughput_Bps;
    if (_config.impose_reconfig_delay && report.downtime_s > 0)
        std::this_thread::sleep_for(duration<double>(report.downtime_s));

    for (const auto& graph : graphs) {
        AdmissionReport ignored;
        report.chain_ids.push_back(deploy_locked(graph, ignored));
    }
    if (_events)
        _events->emit("reconfig_full", {{"downtime_s", std::to_string(report.downtime_s)},
                                        {"chains", std::to_string(report.chain_ids.size())}});
    return report;
}

PrrSwapReport ChainManager::reconfigure_prr(const std::string& prr_id, const ChainSpec& occupant,
                                            uint64_t partial_bitstream_bytes) {
    std::lock_guard lock(_mutex);

    const PrrConfig* prr = _budget.find_prr(prr_id);
    if (!prr) raise(errc::invalid_argument, "unknown PRR '" + prr_id + "'");
    auto occupied = _prr_occupancy.find(prr_id);
    if (occupied == _prr_occupancy.end())
        raise(errc::invalid_argument, "PRR '" + prr_id + "' has no occupant to swap");
    ChainRt& chain = _chains.at(occupied->second);

    ChainGraph incoming = resolve_chain(occupant, _catalog, _crossbar.local_device());
    uint64_t cells = 0, dsp = 0;
    for (const auto& d : incoming.descriptors) {
        cells += d.cost_logic_cells;
        dsp += d.cost_dsp_slices;
    }
    if (cells > prr->size_logic_cells || dsp > prr->size_dsp_slices)
        raise(errc::occupant_too_large,
              "occupant needs " + std::to_string(cells) + " cells / " + std::to_string(dsp) +
                  " DSP, PRR offers " + std::to_string(prr->size_logic_cells) + "/" +
                  std::to_string(prr->size_dsp_slices));

    const std::vector<std::string> old_names = chain.prr_units.at(prr_id);
    auto is_old = [&](const std::string& name) {
        return std::find(old_names.begin(), old_names.end(), name) != old_names.end();
    };

    // Old boundary, in link declaration order.
    struct BoundaryPort {
        std::shared_ptr<StreamBuffer> buffer;
        ItemKind kind;
        size_t link_index;
    };
    std::vector<BoundaryPort> old_in, old_out;
    auto find_buffer = [&](StreamBuffer* raw) -> std::shared_ptr<StreamBuffer> {
        for (const auto& b : chain.buffers)
            if (b.get() == raw) return b;
        return nullptr;
    };
    for (size_t l = 0; l < chain.graph.spec.links.size(); l++) {
        const auto& link = chain.graph.spec.links[l];
        if (is_old(link.dst.unit) && !is_old(link.src.unit)) {
            StreamBuffer* raw = chain.units.at(link.dst.unit)->input(link.dst.port);
            old_in.push_back({find_buffer(raw), raw->kind(), l});
        }
        if (is_old(link.src.unit) && !is_old(link.dst.unit)) {
            StreamBuffer* raw = chain.units.at(link.src.unit)->output(link.src.port);
            old_out.push_back({find_buffer(raw), raw->kind(), l});
        }
    }

    // New boundary: ports not wired by the occupant's internal links, in
    // declaration order.
    std::set<std::pair<std::string, uint32_t>> wired_in, wired_out;
    for (const auto& link : occupant.links) {
        wired_in.insert({link.dst.unit, link.dst.port});
        wired_out.insert({link.src.unit, link.src.port});
    }
    std::vector<std::pair<size_t, uint32_t>> new_in, new_out; // (unit index, port)
    for (size_t i = 0; i < occupant.units.size(); i++) {
        for (uint32_t p = 0; p < incoming.descriptors[i].n_inputs; p++)
            if (!wired_in.count({occupant.units[i].name, p})) new_in.push_back({i, p});
        for (uint32_t p = 0; p < incoming.descriptors[i].n_outputs; p++)
            if (!wired_out.count({occupant.units[i].name, p})) new_out.push_back({i, p});
    }
    if (new_in.size() != old_in.size() || new_out.size() != old_out.size())
        raise(errc::incompatible_boundary,
              "boundary arity mismatch: have " + std::to_string(old_in.size()) + " in / " +
                  std::to_string(old_out.size()) + " out, occupant exposes " +
                  std::to_string(new_in.size()) + " in / " + std::to_string(new_out.size()) +
                  " out");
    for (size_t k = 0; k < new_in.size(); k++)
        if (incoming.descriptors[new_in[k].first].input_kind(new_in[k].second) != old_in[k].kind)
            raise(errc::incompatible_boundary, "input boundary item kind mismatch");
    for (size_t k = 0; k < new_out.size(); k++)
        if (incoming.descriptors[new_out[k].first].output_kind(new_out[k].second) !=
            old_out[k].kind)
            raise(errc::incompatible_boundary, "output boundary item kind mismatch");

    // Quiesce: park at burst boundaries, oldest-first, then force stragglers
    // after the drain timeout.
    const auto deadline = steady_clock::now() + _config.drain_timeout;
    for (const auto& name : old_names) chain.units.at(name)->request_park();
    for (const auto& name : old_names) {
        DeployedUnit& unit = *chain.units.at(name);
        while (!unit.parked() && steady_clock::now() < deadline)
            std::this_thread::sleep_for(100us);
    }
    for (const auto& name : old_names) {
        DeployedUnit& unit = *chain.units.at(name);
        if (!unit.parked()) {
            unit.force_park();
            while (!unit.parked() && steady_clock::now() < deadline + seconds(1))
                std::this_thread::sleep_for(100us);
        }
    }

    // Detach boundary buffers from the old units before destroying them.
    for (auto& port : old_in)
        if (port.buffer) port.buffer->set_consumer_waker({});
    for (auto& port : old_out)
        if (port.buffer) port.buffer->set_producer_waker({});

    // Drop the old occupant. Internal buffers (both endpoints inside the
    // region) go with it.
    std::set<StreamBuffer*> boundary;
    for (auto& port : old_in) boundary.insert(port.buffer.get());
    for (auto& port : old_out) boundary.insert(port.buffer.get());
    std::set<StreamBuffer*> internal;
    for (const auto& name : old_names) {
        DeployedUnit& unit = *chain.units.at(name);
        const auto& desc = unit.unit().descriptor();
        for (uint32_t p = 0; p < desc.n_inputs; p++)
            if (StreamBuffer* b = unit.input(p); b && !boundary.count(b)) internal.insert(b);
        for (uint32_t p = 0; p < desc.n_outputs; p++)
            if (StreamBuffer* b = unit.output(p); b && !boundary.count(b)) internal.insert(b);
    }
    for (const auto& name : old_names) {
        chain.units.at(name)->request_stop();
        chain.units.at(name)->join();
        chain.units.erase(name);
    }
    std::erase_if(chain.buffers,
                  [&](const std::shared_ptr<StreamBuffer>& b) { return internal.count(b.get()); });

    // Rewrite the chain description: occupant units and internal links are
    // replaced, boundary links are re-pointed at the new port list.
    ChainSpec updated = chain.graph.spec;
    std::erase_if(updated.units, [&](const UnitSpec& u) { return is_old(u.name); });
    std::erase_if(updated.links, [&](const LinkSpec& l) {
        return is_old(l.src.unit) && is_old(l.dst.unit);
    });
    for (size_t k = 0; k < old_in.size(); k++) {
        const LinkSpec& old_link = chain.graph.spec.links[old_in[k].link_index];
        for (auto& link : updated.links)
            if (link.src == old_link.src && link.dst == old_link.dst) {
                link.dst.unit = occupant.units[new_in[k].first].name;
                link.dst.port = new_in[k].second;
            }
    }
    for (size_t k = 0; k < old_out.size(); k++) {
        const LinkSpec& old_link = chain.graph.spec.links[old_out[k].link_index];
        for (auto& link : updated.links)
            if (link.src == old_link.src && link.dst == old_link.dst) {
                link.src.unit = occupant.units[new_out[k].first].name;
                link.src.port = new_out[k].second;
            }
    }
    for (UnitSpec u : occupant.units) {
        u.prr = prr_id;
        updated.units.push_back(std::move(u));
    }
    for (const LinkSpec& l : occupant.links) updated.links.push_back(l);

    // Build the new occupant (paused), wire internal links, rebind boundary.
    std::map<std::string, std::unique_ptr<DeployedUnit>> fresh;
    for (size_t i = 0; i < occupant.units.size(); i++) {
        const UnitSpec& u = occupant.units[i];
        const double clock = u.clock_hz > 0 ? u.clock_hz : _budget.platform().fabric_clock_hz;
        auto unit = create_unit(_catalog, u.kind, u.params, _env, u.name, "clk_" + u.name, clock);
        fresh[u.name] = std::make_unique<DeployedUnit>(std::move(unit), _config.batch_items);
    }
    for (const auto& link : occupant.links) {
        const size_t src = size_t(incoming.unit_index(link.src.unit));
        auto buffer = std::make_shared<StreamBuffer>(
            link.capacity, incoming.descriptors[src].output_kind(link.src.port));
        chain.buffers.push_back(buffer);
        fresh.at(link.src.unit)->bind_output(link.src.port, buffer);
        fresh.at(link.dst.unit)->bind_input(link.dst.port, buffer);
    }
    for (size_t k = 0; k < new_in.size(); k++)
        fresh.at(occupant.units[new_in[k].first].name)
            ->bind_input(new_in[k].second, old_in[k].buffer);
    for (size_t k = 0; k < new_out.size(); k++)
        fresh.at(occupant.units[new_out[k].first].name)
            ->bind_output(new_out[k].second, old_out[k].buffer);

    chain.graph = resolve_chain(updated, _catalog, _crossbar.local_device());
    std::vector<std::string> new_names;
    for (const auto& u : occupant.units) new_names.push_back(u.name);
    chain.prr_units[prr_id] = new_names;

    PrrSwapReport report;
    report.prr = prr_id;
    report.swap_time_s =
        double(partial_bitstream_bytes) / _budget.platform().pcap_throughput_Bps;
    if (_config.impose_reconfig_delay && report.swap_time_s > 0)
        std::this_thread::sleep_for(duration<double>(report.swap_time_s));

    for (auto& [name, unit] : fresh) {
        unit->start();
        chain.units[name] = std::move(unit);
    }

    if (_events)
        _events->emit("reconfig_prr",
                      {{"prr", prr_id}, {"swap_time_s", std::to_string(report.swap_time_s)}});
    return report;
}

// ---- bookkeeping -----------------------------------------------------------------

std::vector<ChainInfo> ChainManager::list() const {
    std::lock_guard lock(_mutex);
    std::vector<ChainInfo> out;
    for (const auto& [id, chain] : _chains) {
        ChainInfo info;
        info.id = id;
        info.name = chain.graph.spec.name;
        info.state = chain.state;
        info.n_units = chain.graph.spec.units.size();
        info.cells = chain.cells;
        info.dsp = chain.dsp;
        out.push_back(std::move(info));
    }
    return out;
}

std::vector<ChainStatsRecord> ChainManager::stats() const {
    std::lock_guard lock(_mutex);
    std::vector<ChainStatsRecord> out;
    for (const auto& [id, chain] : _chains) {
        ChainStatsRecord record;
        record.id = id;
        record.name = chain.graph.spec.name;
        for (const auto& [name, unit] : chain.units) {
            ChainUnitStats s;
            s.unit = name;
            s.kind = unit->unit().descriptor().kind;
            s.stream = unit->stats();
            s.block = unit->block_stats();
            record.units.push_back(std::move(s));
        }
        out.push_back(std::move(record));
    }
    return out;
}

BudgetSnapshot ChainManager::budget() const {
    std::lock_guard lock(_mutex);
    return _budget.snapshot();
}

DeployedUnit* ChainManager::find_unit(ChainId id, const std::string& name) {
    std::lock_guard lock(_mutex);
    auto it = _chains.find(id);
    if (it == _chains.end()) return nullptr;
    auto unit = it->second.units.find(name);
    return unit == it->second.units.end() ? nullptr : unit->second.get();
}

std::shared_ptr<SharedUnitWrapper> ChainManager::find_shared(const std::string& share_name) {
    std::lock_guard lock(_mutex);
    auto it = _shared.find(share_name);
    return it == _shared.end() ? nullptr : it->second.wrapper;
}

// ---- distributed admission, server side -------------------------------------------

SubchainReservation ChainManager::reserve_subchain(const SubchainRequest& request) {
    std::lock_guard lock(_mutex);

    ChainSpec spec;
    spec.name = request.name;
    spec.sample_rate_sps = request.sample_rate_sps;
    spec.units = request.units;
    spec.links = request.links;
    ChainGraph graph = resolve_chain(spec, _catalog, _crossbar.local_device());

    AdmissionReport report = validate_locked(graph, _budget, _shared, _prr_occupancy);
    if (!report.admitted()) throw AdmissionError(report);

    ChainRt chain;
    chain.id = _next_id++;
    chain.graph = graph;
    chain.is_subchain = true;
    chain.state = "reserved";
    chain.cells = report.cells_demanded;
    chain.dsp = report.dsp_demanded;

    SubchainReservation reservation;
    try {
        instantiate(chain);
        // boundary inputs: ingress endpoints feeding the named ports
        for (const auto& in : request.inputs) {
            const int idx = graph.unit_index(in.unit);
            if (idx < 0) raise(errc::dangling_port, "boundary input unit '" + in.unit + "'");
            auto buffer = std::make_shared<StreamBuffer>(default_link_capacity,
                                                         graph.descriptors[idx].input_kind(in.port));
            const uint8_t ep = _crossbar.allocate_endpoint_id();
            auto ingress = std::make_shared<CrossbarIngress>(ep, buffer);
            _crossbar.add_route(_crossbar.local_device(), ep, ingress->endpoint(),
                                "ingress:" + in.unit);
            chain.owned_endpoints.push_back(ep);
            chain.ingresses.push_back(ingress);
            chain.buffers.push_back(buffer);
            chain.units.at(in.unit)->bind_input(in.port, buffer);
            reservation.input_sids.push_back(StreamId{0, 0, _crossbar.local_device(), ep});
        }
        // boundary outputs: egresses toward the origin's ingress endpoints
        for (const auto& out : request.outputs) {
            const int idx = graph.unit_index(out.unit);
            if (idx < 0) raise(errc::dangling_port, "boundary output unit '" + out.unit + "'");
            auto buffer = std::make_shared<StreamBuffer>(
                default_link_capacity, graph.descriptors[idx].output_kind(out.port));
            chain.buffers.push_back(buffer);
            chain.units.at(out.unit)->bind_output(out.port, buffer);
            const uint8_t flow = _crossbar.allocate_endpoint_id();
            chain.owned_endpoints.push_back(flow);
            chain.egresses.push_back(std::make_unique<CrossbarEgress>(
                _crossbar, buffer,
                StreamId{_crossbar.local_device(), flow, out.reply_to.dst_device,
                         out.reply_to.dst_endpoint},
                _config.mtu));
        }
    } catch (...) {
        unwind(chain);
        throw;
    }

    _budget.allocate(chain.cells, chain.dsp);
    reservation.handle = chain.id;
    _chains.emplace(chain.id, std::move(chain));
    return reservation;
}

void ChainManager::commit_subchain(uint64_t handle) {
    std::lock_guard lock(_mutex);
    auto it = _chains.find(handle);
    if (it == _chains.end() || !it->second.is_subchain)
        raise(errc::unknown_chain, "reservation " + std::to_string(handle));
    if (it->second.state == "reserved") start_chain(it->second);
}

void ChainManager::release_subchain(uint64_t handle) {
    std::lock_guard lock(_mutex);
    teardown_locked(handle, false);
}

void ChainManager::subchain_set_param(uint64_t handle, const std::string& unit,
                                      const std::string& reg, uint32_t value) {
    std::lock_guard lock(_mutex);
    auto it = _chains.find(handle);
    if (it == _chains.end()) raise(errc::unknown_chain, "reservation " + std::to_string(handle));
    auto u = it->second.units.find(unit);
    if (u == it->second.units.end()) raise(errc::no_such_port, "unit '" + unit + "'");
    u->second->unit().regs().write_named(reg, value);
}

} // namespace sdrp
