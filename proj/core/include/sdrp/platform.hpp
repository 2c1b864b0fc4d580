// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdrp {

// Modeled hybrid-FPGA capacities (Zynq 7045 class): 350 K logic cells, 900
// DSP slices, fabric timing closure up to 300 MHz, 128 MB/s configuration
// port, 9.6 GB/s aggregate HP throughput.
struct PlatformModel {
    uint64_t logic_cells_total = 350000;
    uint64_t dsp_slices_total = 900;
    double fabric_clock_hz = 3.0e8;
    double pcap_throughput_Bps = 128e6;
    double hp_total_Bps = 9.6e9;
};

// Partially reconfigurable region: fixed size, carved out of the fabric at
// platform initialization. Occupants must fit the region in both resources.
struct PrrConfig {
    std::string id;
    uint64_t size_logic_cells = 0;
    uint64_t size_dsp_slices = 0;
};

struct BudgetSnapshot {
    uint64_t cells_total = 0;
    uint64_t cells_allocated = 0;    // general-pool units
    uint64_t cells_prr_reserved = 0; // carved into PRR partitions
    uint64_t cells_free = 0;
    uint64_t dsp_total = 0;
    uint64_t dsp_allocated = 0;
    uint64_t dsp_prr_reserved = 0;
    uint64_t dsp_free = 0;
};

// Exact integer accounting over the general pool. PRR partitions reserve
// their full size up front; their occupants are charged against the
// partition, never against the pool.
class ResourceBudget {
public:
    ResourceBudget(const PlatformModel& platform, const std::vector<PrrConfig>& prrs);

    bool fits(uint64_t cells, uint64_t dsp) const;
    void allocate(uint64_t cells, uint64_t dsp); // throws errc::admission_failed when over
    void release(uint64_t cells, uint64_t dsp);

    uint64_t cells_free() const;
    uint64_t dsp_free() const;
    BudgetSnapshot snapshot() const;

    const PlatformModel& platform() const { return _platform; }
    const std::vector<PrrConfig>& prrs() const { return _prrs; }
    const PrrConfig* find_prr(const std::string& id) const;

private:
    PlatformModel _platform;
    std::vector<PrrConfig> _prrs;
    uint64_t _cells_prr = 0;
    uint64_t _dsp_prr = 0;
    uint64_t _cells_allocated = 0;
    uint64_t _dsp_allocated = 0;
};

} // namespace sdrp
