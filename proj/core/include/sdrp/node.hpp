// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sdrp/cluster.hpp"
#include "sdrp/dma.hpp"
#include "sdrp/dsp/blocks.hpp"
#include "sdrp/manager.hpp"
#include "sdrp/rf.hpp"

namespace sdrp {

struct NodeConfig {
    uint8_t device = 0;
    PlatformModel platform;
    std::vector<PrrConfig> prrs;
    MacDmaConfig mac;
    ManagerConfig manager;
};

// One radio data plane instance: catalog, crossbar, chain manager, MAC
// boundary, RF plane and cluster links, wired together.
class Node {
public:
    explicit Node(NodeConfig config = {});
    ~Node();

    uint8_t device() const { return _config.device; }
    const NodeConfig& config() const { return _config; }

    Catalog& catalog() { return _catalog; }
    Crossbar& crossbar() { return _crossbar; }
    MacDma& mac() { return _mac; }
    RfFrontend& rf() { return _rf; }
    ChainManager& manager() { return *_manager; }
    EventBus& events() { return _events; }

    // ---- cluster plane ----
    void cluster_listen(const std::string& address); // throws endpoint_busy
    uint16_t cluster_port() const;
    std::shared_ptr<NodeLink> cluster_connect(const std::string& address);
    std::vector<std::pair<uint8_t, NodeLinkStats>> cluster_links() const;

    // Registers the control endpoint of a peer device so distributed deploys
    // can run their two-phase admission against it.
    void set_peer_control(uint8_t device, const std::string& address);
    std::optional<std::string> peer_control(uint8_t device) const;

private:
    NodeConfig _config;
    EventBus _events;
    Catalog _catalog;
    Crossbar _crossbar;
    MacDma _mac;
    RfFrontend _rf;
    std::unique_ptr<ChainManager> _manager;

    mutable std::mutex _mutex;
    std::unique_ptr<ClusterListener> _cluster_listener;
    std::vector<std::shared_ptr<NodeLink>> _links;
    std::map<uint8_t, std::string> _peer_controls;
};

} // namespace sdrp
