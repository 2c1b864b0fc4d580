// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/node.hpp"

#include <json.hpp>

#include "sdrp/chainspec.hpp"
#include "sdrp/control.hpp"

namespace sdrp {

using nlohmann::json;

Node::Node(NodeConfig config)
    : _config(config), _catalog(config.platform.fabric_clock_hz),
      _crossbar(config.device, &_events), _mac(config.mac) {
    dsp::register_builtin_blocks(_catalog);

    BlockEnv env;
    env.mac = &_mac;
    env.rf = &_rf;
    _manager = std::make_unique<ChainManager>(_catalog, _config.platform, _config.prrs, _crossbar,
                                              &_events, env, _config.manager);

    // Distributed admission runs over the control protocol against peers
    // registered with set_peer_control.
    RemotePeerOps ops;
    ops.reserve = [this](uint8_t device, const SubchainRequest& request) -> SubchainReservation {
        auto address = peer_control(device);
        if (!address)
            raise(errc::invalid_argument,
                  "no control endpoint registered for device " + std::to_string(device));
        ChainSpec body;
        body.name = request.name;
        body.sample_rate_sps = request.sample_rate_sps;
        body.units = request.units;
        body.links = request.links;
        json args;
        args["phase"] = "reserve";
        json sub = json::parse(chain_spec_to_json(body));
        sub["inputs"] = json::array();
        for (const auto& in : request.inputs)
            sub["inputs"].push_back({{"unit", in.unit}, {"port", in.port}});
        sub["outputs"] = json::array();
        for (const auto& out : request.outputs)
            sub["outputs"].push_back(
                {{"unit", out.unit}, {"port", out.port}, {"reply_sid", pack_sid(out.reply_to)}});
        args["subchain"] = sub;

        ControlClient client(*address);
        const json payload = json::parse(client.call_ok("deploy", args.dump()));
        SubchainReservation reservation;
        reservation.handle = payload.at("handle").get<uint64_t>();
        for (const auto& sid : payload.at("input_sids"))
            reservation.input_sids.push_back(unpack_sid(sid.get<uint32_t>()));
        return reservation;
    };
    ops.commit = [this](uint8_t device, uint64_t handle) {
        auto address = peer_control(device);
        if (!address) raise(errc::invalid_argument, "peer control endpoint lost");
        ControlClient client(*address);
        client.call_ok("deploy", json{{"phase", "commit"}, {"handle", handle}}.dump());
    };
    ops.release = [this](uint8_t device, uint64_t handle) {
        auto address = peer_control(device);
        if (!address) return;
        ControlClient client(*address);
        client.call_ok("deploy", json{{"phase", "release"}, {"handle", handle}}.dump());
    };
    ops.set_param = [this](uint8_t device, uint64_t handle, const std::string& unit,
                           const std::string& reg, uint32_t value) {
        auto address = peer_control(device);
        if (!address) raise(errc::invalid_argument, "peer control endpoint lost");
        ControlClient client(*address);
        client.call_ok("set-param", json{{"handle", handle},
                                         {"unit", unit},
                                         {"register", reg},
                                         {"value", value}}
                                        .dump());
    };
    _manager->set_remote_peers(std::move(ops));
}

Node::~Node() {
    _manager.reset(); // chains down before the crossbar/links go away
    if (_cluster_listener) _cluster_listener->stop();
    for (auto& link : _links) link->shutdown();
}

void Node::cluster_listen(const std::string& address) {
    std::lock_guard lock(_mutex);
    if (_cluster_listener) raise(errc::endpoint_busy, "cluster listener already running");
    _cluster_listener = std::make_unique<ClusterListener>(
        parse_endpoint(address), _config.device, _crossbar,
        [this](std::shared_ptr<NodeLink> link) {
            std::lock_guard inner(_mutex);
            _links.push_back(std::move(link));
        });
}

uint16_t Node::cluster_port() const {
    std::lock_guard lock(_mutex);
    return _cluster_listener ? _cluster_listener->port() : 0;
}

std::shared_ptr<NodeLink> Node::cluster_connect(const std::string& address) {
    auto link = sdrp::cluster_connect(parse_endpoint(address), _config.device, _crossbar);
    std::lock_guard lock(_mutex);
    _links.push_back(link);
    return link;
}

std::vector<std::pair<uint8_t, NodeLinkStats>> Node::cluster_links() const {
    std::lock_guard lock(_mutex);
    std::vector<std::pair<uint8_t, NodeLinkStats>> out;
    for (const auto& link : _links) out.push_back({link->peer_device(), link->stats()});
    return out;
}

void Node::set_peer_control(uint8_t device, const std::string& address) {
    std::lock_guard lock(_mutex);
    _peer_controls[device] = address;
}

std::optional<std::string> Node::peer_control(uint8_t device) const {
    std::lock_guard lock(_mutex);
    auto it = _peer_controls.find(device);
    if (it == _peer_controls.end()) return std::nullopt;
    return it->second;
}

} // namespace sdrp
