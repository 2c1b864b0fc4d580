// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/control.hpp"

#include <atomic>
#include <list>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "sdrp/chainspec.hpp"
#include "sdrp/node.hpp"

namespace sdrp {

using nlohmann::json;

const std::vector<std::string> control_verbs = {
    "catalog",   "deploy", "teardown",      "list",         "set-param",
    "get-param", "rf-set", "rf-get",        "stats",        "reconfig-full",
    "reconfig-prr", "fronthaul-rate", "subscribe",
};

namespace {

json report_to_json(const AdmissionReport& report) {
    json j;
    j["admitted"] = report.admitted();
    j["resource_ok"] = report.resource_ok;
    j["cells_demanded"] = report.cells_demanded;
    j["cells_available"] = report.cells_available;
    j["dsp_demanded"] = report.dsp_demanded;
    j["dsp_available"] = report.dsp_available;
    j["throughput_ok"] = report.throughput_ok;
    j["throughput"] = json::array();
    for (const auto& item : report.throughput)
        j["throughput"].push_back({{"unit", item.unit},
                                   {"demanded_sps", item.demanded_sps},
                                   {"available_sps", item.available_sps},
                                   {"ok", item.ok}});
    j["latency_ok"] = report.latency_ok;
    if (report.latency_budget_set) {
        j["latency_path_s"] = report.latency_path_s;
        j["latency_budget_s"] = report.latency_budget_s;
    }
    j["notes"] = report.notes;
    j["text"] = report.render();
    return j;
}

json descriptor_to_json(const UnitDescriptor& d) {
    json j;
    j["kind"] = d.kind;
    j["n_inputs"] = d.n_inputs;
    j["n_outputs"] = d.n_outputs;
    j["samples_in_per_step"] = d.samples_in_per_step;
    j["samples_out_per_step"] = d.samples_out_per_step;
    j["cycles_per_step"] = d.cycles_per_step;
    j["throughput_sps"] = d.throughput_sps;
    j["latency_cycles"] = d.latency_cycles;
    j["cost_logic_cells"] = d.cost_logic_cells;
    j["cost_dsp_slices"] = d.cost_dsp_slices;
    json regs = json::array();
    for (const auto& reg : d.register_map)
        regs.push_back({{"offset", reg.offset},
                        {"name", reg.name},
                        {"min", reg.min_value},
                        {"max", reg.max_value},
                        {"default", reg.default_value}});
    j["registers"] = regs;
    json in_kinds = json::array(), out_kinds = json::array();
    for (uint32_t p = 0; p < d.n_inputs; p++) in_kinds.push_back(to_string(d.input_kind(p)));
    for (uint32_t p = 0; p < d.n_outputs; p++) out_kinds.push_back(to_string(d.output_kind(p)));
    j["input_kinds"] = in_kinds;
    j["output_kinds"] = out_kinds;
    return j;
}

json stats_to_json(Node& node) {
    json j;

    const CrossbarStats xbar = node.crossbar().stats();
    j["crossbar"]["packets_in"] = xbar.packets_in;
    j["crossbar"]["packets_delivered"] = xbar.packets_delivered;
    j["crossbar"]["packets_dropped"] = xbar.packets_dropped;
    json ports = json::object();
    for (const auto& [label, port] : xbar.per_target)
        ports[label] = {{"packets", port.packets}, {"bytes", port.bytes}, {"drops", port.drops}};
    j["crossbar"]["ports"] = ports;

    const MacStats mac = node.mac().stats();
    j["mac"] = {{"tx_enqueued", mac.tx_enqueued},     {"tx_completed", mac.tx_completed},
                {"rx_arrivals", mac.rx_arrivals},     {"rx_delivered", mac.rx_delivered},
                {"rx_ring_held", mac.rx_ring_held},   {"rx_dropped", mac.rx_dropped}};

    const BudgetSnapshot budget = node.manager().budget();
    j["budget"] = {{"cells_total", budget.cells_total},
                   {"cells_allocated", budget.cells_allocated},
                   {"cells_prr_reserved", budget.cells_prr_reserved},
                   {"cells_free", budget.cells_free},
                   {"dsp_total", budget.dsp_total},
                   {"dsp_allocated", budget.dsp_allocated},
                   {"dsp_prr_reserved", budget.dsp_prr_reserved},
                   {"dsp_free", budget.dsp_free}};

    json chains = json::array();
    for (const auto& record : node.manager().stats()) {
        json jc;
        jc["id"] = record.id;
        jc["name"] = record.name;
        json units = json::array();
        for (const auto& u : record.units) {
            json ju;
            ju["unit"] = u.unit;
            ju["kind"] = u.kind;
            ju["items_in"] = u.stream.items_in;
            ju["items_out"] = u.stream.items_out;
            ju["steps"] = u.stream.steps;
            ju["bursts"] = u.stream.bursts;
            for (const auto& [name, value] : u.block) ju[name] = value;
            units.push_back(ju);
        }
        jc["units"] = units;
        chains.push_back(jc);
    }
    j["chains"] = chains;

    json cluster = json::array();
    for (const auto& [device, stats] : node.cluster_links())
        cluster.push_back({{"device", device},
                           {"tx_frames", stats.tx_frames},
                           {"rx_frames", stats.rx_frames}});
    j["cluster"] = cluster;

    j["rf"] = node.rf().all_params();
    return j;
}

json event_to_json(const Event& event) {
    json j;
    j["seq"] = event.seq;
    j["type"] = event.type;
    j["fields"] = event.fields;
    return j;
}

} // namespace

// ---- session / dispatch -----------------------------------------------------

ControlSession::ControlSession(ControlService& service, std::function<void(const std::string&)> out)
    : _service(service), _out(std::move(out)) {}

ControlSession::~ControlSession() {
    if (_subscription) _service.node().events().unsubscribe(_subscription);
}

void ControlSession::handle_line(const std::string& line) {
    _out(_service.dispatch(line, this, &_subscription));
}

std::string ControlService::dispatch(const std::string& line, ControlSession* session,
                                     uint64_t* subscription) {
    json request;
    json id = nullptr;
    json response;
    try {
        request = json::parse(line);
        if (request.contains("id")) id = request["id"];
        const std::string verb = request.at("verb").get<std::string>();
        const json args = request.value("args", json::object());
        json payload = json::object();

        if (verb == "catalog") {
            payload["kinds"] = json::array();
            for (const auto& d : _node.catalog().list())
                payload["kinds"].push_back(descriptor_to_json(d));
        } else if (verb == "deploy") {
            const std::string phase = args.value("phase", "");
            if (phase.empty()) {
                const std::string spec = args.at("spec").get<std::string>();
                ChainGraph graph =
                    parse_chain_spec(spec, _node.catalog(), _node.device());
                DeployResult result = _node.manager().deploy(graph);
                payload["chain_id"] = result.id;
                payload["report"] = report_to_json(result.report);
            } else if (phase == "reserve") {
                const json& sub = args.at("subchain");
                ChainSpec spec = chain_spec_from_json(sub.dump());
                SubchainRequest req;
                req.name = spec.name;
                req.sample_rate_sps = spec.sample_rate_sps;
                req.units = spec.units;
                req.links = spec.links;
                for (const auto& in : sub.value("inputs", json::array()))
                    req.inputs.push_back(
                        {in.at("unit").get<std::string>(), in.at("port").get<uint32_t>()});
                for (const auto& out : sub.value("outputs", json::array()))
                    req.outputs.push_back({out.at("unit").get<std::string>(),
                                           out.at("port").get<uint32_t>(),
                                           unpack_sid(out.at("reply_sid").get<uint32_t>())});
                SubchainReservation reservation = _node.manager().reserve_subchain(req);
                payload["handle"] = reservation.handle;
                payload["input_sids"] = json::array();
                for (const auto& sid : reservation.input_sids)
                    payload["input_sids"].push_back(pack_sid(sid));
            } else if (phase == "commit") {
                _node.manager().commit_subchain(args.at("handle").get<uint64_t>());
            } else if (phase == "release") {
                _node.manager().release_subchain(args.at("handle").get<uint64_t>());
            } else {
                raise(errc::invalid_argument, "unknown deploy phase '" + phase + "'");
            }
        } else if (verb == "teardown") {
            _node.manager().teardown(args.at("chain").get<ChainId>());
        } else if (verb == "list") {
            payload["chains"] = json::array();
            for (const auto& info : _node.manager().list())
                payload["chains"].push_back({{"id", info.id},
                                             {"name", info.name},
                                             {"state", info.state},
                                             {"units", info.n_units},
                                             {"cells", info.cells},
                                             {"dsp", info.dsp}});
        } else if (verb == "set-param") {
            const std::string unit = args.at("unit").get<std::string>();
            const std::string reg = args.at("register").get<std::string>();
            const uint32_t value = args.at("value").get<uint32_t>();
            if (args.contains("handle"))
                _node.manager().subchain_set_param(args["handle"].get<uint64_t>(), unit, reg,
                                                   value);
            else
                _node.manager().set_param(args.at("chain").get<ChainId>(), unit, reg, value);
        } else if (verb == "get-param") {
            payload["value"] =
                _node.manager().get_param(args.at("chain").get<ChainId>(),
                                          args.at("unit").get<std::string>(),
                                          args.at("register").get<std::string>());
        } else if (verb == "rf-set") {
            const RfSetResult result = _node.rf().set_param(
                args.at("name").get<std::string>(), args.at("value").get<double>());
            payload["value"] = result.value;
            payload["snapped"] = result.snapped;
        } else if (verb == "rf-get") {
            payload["value"] = _node.rf().get_param(args.at("name").get<std::string>());
        } else if (verb == "stats") {
            payload = stats_to_json(_node);
        } else if (verb == "reconfig-full") {
            std::vector<ChainGraph> graphs;
            for (const auto& spec : args.at("specs"))
                graphs.push_back(parse_chain_spec(spec.get<std::string>(), _node.catalog(),
                                                  _node.device()));
            const FullReconfigReport report = _node.manager().reconfigure_full(
                graphs, args.at("bitstream_bytes").get<uint64_t>());
            payload["downtime_s"] = report.downtime_s;
            payload["chain_ids"] = report.chain_ids;
        } else if (verb == "reconfig-prr") {
            const ChainSpec occupant =
                parse_chain_spec_text(args.at("occupant").get<std::string>());
            const PrrSwapReport report = _node.manager().reconfigure_prr(
                args.at("prr").get<std::string>(), occupant,
                args.at("bitstream_bytes").get<uint64_t>());
            payload["prr"] = report.prr;
            payload["swap_time_s"] = report.swap_time_s;
        } else if (verb == "fronthaul-rate") {
            payload["rate_bps"] = fronthaul_rate(args.at("antennas").get<uint64_t>(),
                                                 args.at("sample_rate_sps").get<double>(),
                                                 args.at("bits_per_component").get<uint64_t>());
        } else if (verb == "subscribe") {
            if (!session) raise(errc::invalid_argument, "subscribe needs a streaming session");
            if (*subscription == 0) {
                auto out = session->_out;
                *subscription = _node.events().subscribe([out](const Event& event) {
                    json j;
                    j["event"] = event_to_json(event);
                    out(j.dump());
                });
            }
            payload["subscribed"] = true;
        } else {
            raise(errc::invalid_argument, "unknown verb '" + verb + "'");
        }

        response["id"] = id;
        response["status"] = "ok";
        response["payload"] = payload;
    } catch (const AdmissionError& e) {
        response["id"] = id;
        response["status"] = "error";
        response["error"] = {{"code", to_string(e.code())},
                             {"message", e.what()},
                             {"report", report_to_json(e.report)}};
    } catch (const Error& e) {
        response["id"] = id;
        response["status"] = "error";
        response["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    } catch (const json::exception& e) {
        response["id"] = id;
        response["status"] = "error";
        response["error"] = {{"code", "SyntaxError"}, {"message", e.what()}};
    } catch (const std::exception& e) {
        response["id"] = id;
        response["status"] = "error";
        response["error"] = {{"code", "Internal"}, {"message", e.what()}};
    }
    return response.dump();
}

// ---- server -------------------------------------------------------------------

struct ControlService::Server {
    std::unique_ptr<TcpListener> listener;
    std::thread accept_thread;
    std::mutex mutex;
    std::list<std::thread> workers;
    std::atomic<bool> stopping{false};
};

ControlService::ControlService(Node& node) : _node(node) {}

ControlService::~ControlService() {
    stop();
}

std::string ControlService::handle_line(const std::string& line) {
    uint64_t no_subscription = 0;
    return dispatch(line, nullptr, &no_subscription);
}

void ControlService::start(const std::string& address) {
    if (_server) raise(errc::endpoint_busy, "control service already running");
    auto server = std::make_unique<Server>();
    server->listener = std::make_unique<TcpListener>(parse_endpoint(address));
    Server* raw = server.get();
    server->accept_thread = std::thread([this, raw] {
        while (true) {
            auto stream = raw->listener->accept();
            if (!stream) return;
            std::lock_guard lock(raw->mutex);
            if (raw->stopping.load()) return;
            auto shared_stream = std::shared_ptr<TcpStream>(stream.release());
            raw->workers.emplace_back([this, shared_stream] {
                auto write_mutex = std::make_shared<std::mutex>();
                ControlSession session(*this, [shared_stream, write_mutex](const std::string& s) {
                    std::lock_guard lock(*write_mutex);
                    std::string line = s + "\n";
                    try {
                        shared_stream->write_all(
                            ByteSpan(reinterpret_cast<const uint8_t*>(line.data()), line.size()));
                    } catch (const Error&) {
                        // client went away; the read loop will notice
                    }
                });
                std::string buffer;
                uint8_t chunk[4096];
                while (true) {
                    size_t n = 0;
                    try {
                        n = shared_stream->read_some(chunk, sizeof(chunk));
                    } catch (const Error&) {
                        break;
                    }
                    if (n == 0) break;
                    buffer.append(reinterpret_cast<const char*>(chunk), n);
                    size_t nl;
                    while ((nl = buffer.find('\n')) != std::string::npos) {
                        const std::string line = buffer.substr(0, nl);
                        buffer.erase(0, nl + 1);
                        if (!line.empty()) session.handle_line(line);
                    }
                }
                shared_stream->close();
            });
        }
    });
    _server = std::move(server);
}

uint16_t ControlService::port() const {
    return _server && _server->listener ? _server->listener->port() : 0;
}

void ControlService::stop() {
    if (!_server) return;
    _server->stopping.store(true);
    _server->listener->close();
    if (_server->accept_thread.joinable()) _server->accept_thread.join();
    // Connections see EOF when clients leave; workers that still serve a
    // client are detached from teardown by closing the listener only. Join
    // what has finished; force-close is the client's job.
    {
        std::lock_guard lock(_server->mutex);
        for (auto& worker : _server->workers)
            if (worker.joinable()) worker.detach();
        _server->workers.clear();
    }
    _server.reset();
}

// ---- client -------------------------------------------------------------------

struct ControlClient::Impl {
    std::unique_ptr<TcpStream> stream;
    std::string buffer;
    uint64_t next_id = 1;
    std::mutex mutex;
};

ControlClient::ControlClient(const std::string& address) : _impl(std::make_unique<Impl>()) {
    _impl->stream = tcp_connect(parse_endpoint(address));
}

ControlClient::~ControlClient() {
    stop();
}

void ControlClient::stop() {
    if (_impl && _impl->stream) _impl->stream->close();
}

static std::string read_line(TcpStream& stream, std::string& buffer) {
    uint8_t chunk[4096];
    while (true) {
        const size_t nl = buffer.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            return line;
        }
        const size_t n = stream.read_some(chunk, sizeof(chunk));
        if (n == 0) raise(errc::link_down, "control connection closed");
        buffer.append(reinterpret_cast<const char*>(chunk), n);
    }
}

ControlReply ControlClient::call(const std::string& verb, const std::string& args_json) {
    std::lock_guard lock(_impl->mutex);
    json request;
    request["id"] = _impl->next_id++;
    request["verb"] = verb;
    try {
        request["args"] = json::parse(args_json);
    } catch (const json::exception& e) {
        raise(errc::invalid_argument, std::string("args must be JSON: ") + e.what());
    }
    const std::string line = request.dump() + "\n";
    _impl->stream->write_all(ByteSpan(reinterpret_cast<const uint8_t*>(line.data()), line.size()));

    // Skip interleaved event records; take the next response.
    while (true) {
        const std::string reply_line = read_line(*_impl->stream, _impl->buffer);
        json reply;
        try {
            reply = json::parse(reply_line);
        } catch (const json::exception&) {
            continue;
        }
        if (reply.contains("event")) continue;
        ControlReply out;
        out.ok = reply.value("status", "") == "ok";
        if (out.ok) {
            out.payload_json = reply.value("payload", json::object()).dump();
        } else {
            const json error = reply.value("error", json::object());
            out.error_code = error.value("code", "Internal");
            out.error_message = error.value("message", "");
            if (error.contains("report")) out.error_detail_json = error["report"].dump();
        }
        return out;
    }
}

std::string ControlClient::call_ok(const std::string& verb, const std::string& args_json) {
    ControlReply reply = call(verb, args_json);
    if (!reply.ok) {
        for (size_t code = 0; code < size_t(errc::io_error) + 1; code++)
            if (reply.error_code == to_string(errc(code)))
                raise(errc(code), reply.error_message);
        raise(errc::io_error, reply.error_code + ": " + reply.error_message);
    }
    return reply.payload_json;
}

void ControlClient::subscribe(std::function<void(const std::string&)> on_event) {
    ControlReply reply = call("subscribe");
    if (!reply.ok) raise(errc::io_error, "subscribe rejected: " + reply.error_message);
    while (true) {
        std::string line;
        try {
            line = read_line(*_impl->stream, _impl->buffer);
        } catch (const Error&) {
            return;
        }
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception&) {
            continue;
        }
        if (doc.contains("event")) on_event(doc["event"].dump());
    }
}

} // namespace sdrp
