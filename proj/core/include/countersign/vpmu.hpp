#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "countersign/cache.hpp"
#include "countersign/events.hpp"

namespace csign {

/// Cycle costs and cache geometry of the virtual PMU. Defaults are
/// Cortex-A8-like: 32 KiB 4-way L1I/L1D, 256 KiB 8-way L2, 64-byte lines.
struct VpmuConfig {
    CacheConfig l1i{128, 4, 64};
    CacheConfig l1d{128, 4, 64};
    CacheConfig l2{512, 8, 64};
    std::uint32_t probe_cost = 1;        // cycles per branch or memory probe
    std::uint32_t l1_miss_penalty = 10;
    std::uint32_t l2_miss_penalty = 50;
    std::uint32_t mispredict_penalty = 12;

    bool operator==(const VpmuConfig&) const = default;
};

inline bool operator==(const CacheConfig& a, const CacheConfig& b) {
    return a.sets == b.sets && a.ways == b.ways && a.line_bytes == b.line_bytes;
}

/// One checkpoint observation: counter delta since the previous hit of the
/// same checkpoint id (run start for the first hit).
struct CheckpointHit {
    std::uint32_t id = 0;
    std::uint32_t hit_idx = 0;
    CounterVector delta;
};

/// Deterministic virtual performance monitoring unit. One instance models
/// one single-threaded run: targets feed it branch, memory and checkpoint
/// probes, and it maintains the eight counters, a 2-bit branch predictor
/// table, the two-level cache model, the checkpoint log, and (optionally)
/// periodic counter snapshots for time-series sampling. State is a pure
/// function of the probe sequence; no wall clock or host state enters.
class Vpmu {
public:
    explicit Vpmu(const VpmuConfig& config = {});

    /// Consults and updates the 2-bit saturating predictor for this site
    /// (0..3 scale, initialized to 1 = weakly-not-taken, predict taken at
    /// >= 2), bumps BR_MSP on mismatch and advances the cycle clock.
    void record_branch(std::uint32_t site, bool taken);

    /// Probes L1I or L1D, then L2 on a miss. Instruction misses count
    /// L1_ICM; data accesses count L1_DCA/L1_DCM and, on L1 miss,
    /// L2_DCA/L2_DCM. Any L2 miss counts L2_TCM.
    void record_access(std::uint64_t address, bool is_instruction);

    /// Appends (id, counters - counters at previous hit of id) to the
    /// checkpoint log. hit_idx counts prior hits of the same id in this run.
    void checkpoint(std::uint32_t id);

    /// Enables periodic snapshots of the cumulative counters every
    /// sample_interval cycles. Must be called before any probes.
    void enable_sampling(std::uint64_t sample_interval);

    const CounterVector& counters() const { return counters_; }
    const std::vector<CheckpointHit>& checkpoint_log() const { return checkpoint_log_; }

    /// Cumulative counters at each crossed sampling boundary k*t_s, k >= 1.
    const std::vector<CounterVector>& sample_snapshots() const { return snapshots_; }
    std::uint64_t sample_interval() const { return sample_interval_; }

    const VpmuConfig& config() const { return config_; }

private:
    void advance_cycles(std::uint64_t cycles);

    VpmuConfig config_;
    CounterVector counters_;
    CacheModel l1i_;
    CacheModel l1d_;
    CacheModel l2_;
    std::unordered_map<std::uint32_t, std::uint8_t> branch_table_;
    std::vector<CheckpointHit> checkpoint_log_;
    std::unordered_map<std::uint32_t, CounterVector> checkpoint_last_;
    std::unordered_map<std::uint32_t, std::uint32_t> checkpoint_hits_;
    std::uint64_t sample_interval_ = 0;
    std::uint64_t next_boundary_ = 0;
    std::vector<CounterVector> snapshots_;
};

}  // namespace csign
