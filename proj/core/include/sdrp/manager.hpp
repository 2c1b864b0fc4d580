// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>

#include "sdrp/chainspec.hpp"
#include "sdrp/crossbar.hpp"
#include "sdrp/platform.hpp"

namespace sdrp {

struct ThroughputCheckItem {
    std::string unit;
    double demanded_sps = 0;
    double available_sps = 0;
    bool ok = true;
};

// A chain deploys iff all three checks hold. Each check carries the numbers
// it compared so the verdict is auditable.
struct AdmissionReport {
    bool resource_ok = true;
    uint64_t cells_demanded = 0;
    uint64_t cells_available = 0;
    uint64_t dsp_demanded = 0;
    uint64_t dsp_available = 0;

    bool throughput_ok = true;
    std::vector<ThroughputCheckItem> throughput;

    bool latency_ok = true;
    bool latency_budget_set = false;
    double latency_path_s = 0;
    double latency_budget_s = 0;

    std::vector<std::string> notes;

    bool admitted() const { return resource_ok && throughput_ok && latency_ok; }
    std::string render() const;
};

class AdmissionError : public Error {
public:
    explicit AdmissionError(AdmissionReport r)
        : Error(errc::admission_failed, r.render()), report(std::move(r)) {}
    AdmissionReport report;
};

using ChainId = uint64_t;

struct DeployResult {
    ChainId id = 0;
    AdmissionReport report;
};

struct ChainInfo {
    ChainId id = 0;
    std::string name;
    std::string state;
    size_t n_units = 0;
    uint64_t cells = 0;
    uint64_t dsp = 0;
};

struct ChainUnitStats {
    std::string unit;
    std::string kind;
    UnitStats stream;
    std::vector<std::pair<std::string, uint64_t>> block;
};

struct ChainStatsRecord {
    ChainId id = 0;
    std::string name;
    std::vector<ChainUnitStats> units;
};

struct FullReconfigReport {
    double downtime_s = 0;
    std::vector<ChainId> chain_ids;
};

struct PrrSwapReport {
    std::string prr;
    double swap_time_s = 0;
};

// ---- distributed admission (two-phase: reserve, commit) --------------------

struct BoundaryInput {
    std::string unit;
    uint32_t port = 0;
};

struct BoundaryOutput {
    std::string unit;
    uint32_t port = 0;
    StreamId reply_to; // where the remote egress must send
};

struct SubchainRequest {
    std::string name;
    double sample_rate_sps = 0;
    std::vector<UnitSpec> units;
    std::vector<LinkSpec> links; // internal to the subchain
    std::vector<BoundaryInput> inputs;
    std::vector<BoundaryOutput> outputs;
};

struct SubchainReservation {
    uint64_t handle = 0;
    std::vector<StreamId> input_sids; // destination SIDs for each boundary input
};

// How the manager reaches peer nodes' control endpoints. Wired up by the
// node layer; absent functions make remote units undeployable.
struct RemotePeerOps {
    std::function<SubchainReservation(uint8_t device, const SubchainRequest&)> reserve;
    std::function<void(uint8_t device, uint64_t handle)> commit;
    std::function<void(uint8_t device, uint64_t handle)> release;
    std::function<void(uint8_t device, uint64_t handle, const std::string& unit,
                       const std::string& reg, uint32_t value)>
        set_param;
};

struct ManagerConfig {
    size_t mtu = default_mtu;
    double crossbar_hop_latency_s = 1e-6;
    std::chrono::milliseconds drain_timeout{100};
    std::chrono::milliseconds teardown_timeout{2000};
    size_t batch_items = 4096;
    bool impose_reconfig_delay = true; // sleep the modeled PCAP time
};

// Deploys, validates, reconfigures and audits processing chains against the
// modeled platform. Structural mutations (deploy/teardown/reconfigure) are
// serialized; parametric control and stats reads run concurrently with
// streaming.
class ChainManager {
public:
    using Config = ManagerConfig;

    ChainManager(Catalog& catalog, const PlatformModel& platform, std::vector<PrrConfig> prrs,
                 Crossbar& crossbar, EventBus* events = nullptr, BlockEnv env = {},
                 Config config = {});
    ~ChainManager();

    AdmissionReport validate(const ChainGraph& graph) const;
    DeployResult deploy(const ChainGraph& graph); // throws AdmissionError
    void teardown(ChainId id);                    // throws errc::unknown_chain

    void set_param(ChainId id, const std::string& unit, const std::string& reg, uint32_t value);
    uint32_t get_param(ChainId id, const std::string& unit, const std::string& reg) const;

    FullReconfigReport reconfigure_full(const std::vector<ChainGraph>& graphs,
                                        uint64_t total_bitstream_bytes);
    PrrSwapReport reconfigure_prr(const std::string& prr_id, const ChainSpec& occupant,
                                  uint64_t partial_bitstream_bytes);

    std::vector<ChainInfo> list() const;
    std::vector<ChainStatsRecord> stats() const;
    BudgetSnapshot budget() const;
    const PlatformModel& platform() const { return _budget.platform(); }

    // Test/tool access to live units.
    DeployedUnit* find_unit(ChainId id, const std::string& name);
    std::shared_ptr<SharedUnitWrapper> find_shared(const std::string& share_name);

    // ---- distributed admission, server side ----
    SubchainReservation reserve_subchain(const SubchainRequest& request);
    void commit_subchain(uint64_t handle);
    void release_subchain(uint64_t handle);
    void subchain_set_param(uint64_t handle, const std::string& unit, const std::string& reg,
                            uint32_t value);
    void set_remote_peers(RemotePeerOps ops);

private:
    struct SharedRt {
        std::shared_ptr<SharedUnitWrapper> wrapper;
        std::string kind;
        uint64_t cells = 0;
        uint64_t dsp = 0;
        double demand_sps = 0;
        int refcount = 0;
        uint8_t endpoint_id = 0;
    };

    struct ChainRt {
        ChainId id = 0;
        ChainGraph graph;
        std::string state = "running";
        std::map<std::string, std::unique_ptr<DeployedUnit>> units;
        std::vector<std::shared_ptr<StreamBuffer>> buffers;
        std::vector<std::unique_ptr<CrossbarEgress>> egresses;
        std::vector<std::shared_ptr<CrossbarIngress>> ingresses;
        std::vector<uint8_t> owned_endpoints; // endpoint ids to unroute on teardown
        std::map<std::string, double> shared_demand; // share name -> demand
        std::map<uint8_t, uint64_t> remote_holds;    // device -> reservation handle
        std::map<std::string, std::vector<std::string>> prr_units; // prr id -> unit names
        uint64_t cells = 0;
        uint64_t dsp = 0;
        bool is_subchain = false;
    };

    AdmissionReport validate_locked(const ChainGraph& graph, const ResourceBudget& budget,
                                    const std::map<std::string, SharedRt>& shared,
                                    const std::map<std::string, ChainId>& prr_occupancy) const;
    ChainId deploy_locked(const ChainGraph& graph, AdmissionReport& report);
    void teardown_locked(ChainId id, bool drain);
    void start_chain(ChainRt& chain);
    void instantiate(ChainRt& chain);
    void unwind(ChainRt& chain);
    std::map<std::string, double> unit_demands(const ChainGraph& graph) const;

    Catalog& _catalog;
    Crossbar& _crossbar;
    EventBus* _events;
    BlockEnv _env;
    Config _config;

    mutable std::mutex _mutex; // structural serialization
    ResourceBudget _budget;
    std::map<ChainId, ChainRt> _chains;
    std::map<std::string, SharedRt> _shared;
    std::map<std::string, ChainId> _prr_occupancy; // prr id -> chain
    RemotePeerOps _peers;
    ChainId _next_id = 1;
};

// rate = antennas * sample_rate * 2 components * bits_per_component, in bits
// per second. Throws errc::invalid_argument on non-positive inputs.
double fronthaul_rate(uint64_t antennas, double sample_rate_sps, uint64_t bits_per_component);

} // namespace sdrp
