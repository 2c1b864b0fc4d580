// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/platform.hpp"

#include "sdrp/errors.hpp"

namespace sdrp {

ResourceBudget::ResourceBudget(const PlatformModel& platform, const std::vector<PrrConfig>& prrs)
    : _platform(platform), _prrs(prrs) {
    for (const auto& prr : _prrs) {
        if (prr.id.empty()) raise(errc::invalid_argument, "PRR with empty id");
        _cells_prr += prr.size_logic_cells;
        _dsp_prr += prr.size_dsp_slices;
    }
    if (_cells_prr > _platform.logic_cells_total || _dsp_prr > _platform.dsp_slices_total)
        raise(errc::invalid_argument, "PRR partitions exceed platform resources");
}

bool ResourceBudget::fits(uint64_t cells, uint64_t dsp) const {
    return cells <= cells_free() && dsp <= dsp_free();
}

void ResourceBudget::allocate(uint64_t cells, uint64_t dsp) {
    if (!fits(cells, dsp))
        raise(errc::admission_failed,
              "allocation of " + std::to_string(cells) + " cells / " + std::to_string(dsp) +
                  " DSP exceeds free budget");
    _cells_allocated += cells;
    _dsp_allocated += dsp;
}

void ResourceBudget::release(uint64_t cells, uint64_t dsp) {
    if (cells > _cells_allocated || dsp > _dsp_allocated)
        raise(errc::invalid_argument, "releasing more than allocated");
    _cells_allocated -= cells;
    _dsp_allocated -= dsp;
}

uint64_t ResourceBudget::cells_free() const {
    return _platform.logic_cells_total - _cells_prr - _cells_allocated;
}

uint64_t ResourceBudget::dsp_free() const {
    return _platform.dsp_slices_total - _dsp_prr - _dsp_allocated;
}

BudgetSnapshot ResourceBudget::snapshot() const {
    BudgetSnapshot s;
    s.cells_total = _platform.logic_cells_total;
    s.cells_allocated = _cells_allocated;
    s.cells_prr_reserved = _cells_prr;
    s.cells_free = cells_free();
    s.dsp_total = _platform.dsp_slices_total;
    s.dsp_allocated = _dsp_allocated;
    s.dsp_prr_reserved = _dsp_prr;
    s.dsp_free = dsp_free();
    return s;
}

const PrrConfig* ResourceBudget::find_prr(const std::string& id) const {
    for (const auto& prr : _prrs)
        if (prr.id == id) return &prr;
    return nullptr;
}

} // namespace sdrp
