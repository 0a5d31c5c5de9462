#pragma once

#include <cstdint>

#include "countersign/vpmu.hpp"

namespace csign {

/// Receiver for basic-block probes, used by the fuzzer for edge coverage.
class CoverageSink {
public:
    virtual ~CoverageSink() = default;
    virtual void on_block(std::uint32_t block_id) = 0;
};

/// Instrumentation hub handed to a target for one run. Block probes model an
/// instruction fetch of the block's code line and feed edge coverage; data
/// probes walk the touched cache lines. Buffer addresses come from the
/// deterministic arena, never from host pointers, so runs replay bit-exact
/// on any machine.
class ProbeContext {
public:
    static constexpr std::uint64_t kCodeBase = 0x0100'0000;
    static constexpr std::uint64_t kCodeBlockBytes = 64;
    static constexpr std::uint64_t kDataBase = 0x2000'0000;

    ProbeContext(Vpmu* vpmu, CoverageSink* coverage)
        : vpmu_(vpmu), coverage_(coverage) {}

    void block(std::uint32_t block_id) {
        if (vpmu_) {
            vpmu_->record_access(kCodeBase + block_id * kCodeBlockBytes, true);
        }
        if (coverage_) coverage_->on_block(block_id);
    }

    void branch(std::uint32_t site, bool taken) {
        if (vpmu_) vpmu_->record_branch(site, taken);
    }

    /// Touches every cache line in [address, address + bytes).
    void memory(std::uint64_t address, std::uint64_t bytes) {
        if (!vpmu_ || bytes == 0) return;
        const std::uint64_t line = vpmu_->config().l1d.line_bytes;
        const std::uint64_t first = address / line;
        const std::uint64_t last = (address + bytes - 1) / line;
        for (std::uint64_t l = first; l <= last; ++l) {
            vpmu_->record_access(l * line, false);
        }
    }

    void checkpoint(std::uint32_t id) {
        if (vpmu_) vpmu_->checkpoint(id);
    }

    Vpmu* vpmu() const { return vpmu_; }
    CoverageSink* coverage() const { return coverage_; }

    /// Probe-free context for unmonitored phases (key generation).
    static ProbeContext muted() { return ProbeContext(nullptr, nullptr); }

private:
    Vpmu* vpmu_;
    CoverageSink* coverage_;
};

}  // namespace csign
