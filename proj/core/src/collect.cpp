#include "countersign/collect.hpp"

#include <stdexcept>

namespace csign {

TimeSeriesResult sample_time_series(Target& target, std::span<const std::uint8_t> input,
                                    std::uint64_t t_m, std::uint64_t t_s,
                                    const VpmuConfig& vpmu_config) {
    if (t_s < 1 || t_m < t_s) {
        throw std::invalid_argument("sample_time_series: need t_s >= 1 and t_m >= t_s");
    }

    TimeSeriesResult result;
    Vpmu vpmu(vpmu_config);
    vpmu.enable_sampling(t_s);
    ProbeContext probes(&vpmu, nullptr);

    std::uint64_t call_idx = 0;
    while (vpmu.counters().virtual_cycle < t_m) {
        const RunOutcome outcome = target.run_sign(input, probes, call_idx++);
        if (!outcome.ok) {
            result.aborted = true;
            result.error = outcome.error;
            break;
        }
    }
    result.sign_calls = call_idx;

    const std::uint64_t full_intervals = t_m / t_s;  // N = full_intervals + 1 rows
    const auto& snaps = vpmu.sample_snapshots();
    const CounterVector& final_counters = vpmu.counters();

    TimeSeriesSignature& sig = result.signature;
    sig.t_s = t_s;
    sig.t_m = t_m;
    sig.rows.reserve(full_intervals + 1);

    CounterVector prev;  // zero
    for (std::uint64_t i = 0; i < full_intervals; ++i) {
        const CounterVector& at_boundary = i < snaps.size() ? snaps[i] : final_counters;
        const CounterVector d = at_boundary.delta_since(prev);
        sig.rows.push_back(d.counts);
        prev = at_boundary;
    }
    const CounterVector tail = final_counters.delta_since(prev);
    sig.rows.push_back(tail.counts);
    sig.tail_cycles = tail.virtual_cycle;
    sig.partial_tail = true;
    return result;
}

CheckpointSignature collect_checkpoints(Target& target,
                                        std::span<const std::vector<std::uint8_t>> seeds,
                                        const VpmuConfig& vpmu_config) {
    if (seeds.empty()) {
        throw std::invalid_argument("collect_checkpoints: seed set is empty");
    }
    CheckpointSignature sig;
    for (std::size_t seed_id = 0; seed_id < seeds.size(); ++seed_id) {
        Vpmu vpmu(vpmu_config);
        ProbeContext probes(&vpmu, nullptr);
        const RunOutcome outcome = target.run_sign(seeds[seed_id], probes);
        if (!outcome.ok) {
            sig.skipped.push_back({static_cast<std::uint32_t>(seed_id), outcome.error});
            continue;
        }
        for (const CheckpointHit& hit : vpmu.checkpoint_log()) {
            CheckpointRow row;
            row.seed_id = static_cast<std::uint32_t>(seed_id);
            row.checkpoint_id = hit.id;
            row.hit_idx = hit.hit_idx;
            row.delta = hit.delta.counts;
            sig.rows.push_back(row);
        }
    }
    return sig;
}

}  // namespace csign
