#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "countersign/signatures.hpp"
#include "countersign/target.hpp"
#include "countersign/vpmu.hpp"

namespace csign {

struct TimeSeriesResult {
    TimeSeriesSignature signature;  // partial on abort
    bool aborted = false;
    std::string error;
    std::uint64_t sign_calls = 0;
};

/// Runs the target's sign() in a loop on one input until t_m virtual cycles
/// elapse, sampling cumulative counters every t_s cycles. The signature has
/// floor(t_m/t_s) + 1 rows of per-interval deltas; the final row covers the
/// partial tail (plus the overshoot of the last call), so column sums equal
/// the final cumulative counters.
TimeSeriesResult sample_time_series(Target& target, std::span<const std::uint8_t> input,
                                    std::uint64_t t_m, std::uint64_t t_s,
                                    const VpmuConfig& vpmu_config);

/// One monitored run per seed on a fresh VPMU; checkpoint logs concatenate
/// with seed ids in corpus order. Aborting seeds are skipped and reported.
CheckpointSignature collect_checkpoints(Target& target,
                                        std::span<const std::vector<std::uint8_t>> seeds,
                                        const VpmuConfig& vpmu_config);

}  // namespace csign
