#include "countersign/vpmu.hpp"

namespace csign {

Vpmu::Vpmu(const VpmuConfig& config)
    : config_(config), l1i_(config.l1i), l1d_(config.l1d), l2_(config.l2) {}

void Vpmu::enable_sampling(std::uint64_t sample_interval) {
    sample_interval_ = sample_interval;
    next_boundary_ = sample_interval;
}

void Vpmu::advance_cycles(std::uint64_t cycles) {
    counters_[EventKind::CYCLES] += cycles;
    counters_.virtual_cycle += cycles;
    if (sample_interval_ == 0) return;
    // Snapshot at every boundary the clock just crossed. The snapshot is the
    // counter state after the event that crossed it; probes are atomic.
    while (counters_.virtual_cycle >= next_boundary_) {
        snapshots_.push_back(counters_);
        next_boundary_ += sample_interval_;
    }
}

void Vpmu::record_branch(std::uint32_t site, bool taken) {
    auto [it, inserted] = branch_table_.try_emplace(site, std::uint8_t{1});
    std::uint8_t& counter = it->second;
    const bool predicted_taken = counter >= 2;

    std::uint64_t cost = config_.probe_cost;
    if (predicted_taken != taken) {
        ++counters_[EventKind::BR_MSP];
        cost += config_.mispredict_penalty;
    }
    if (taken) {
        if (counter < 3) ++counter;
    } else {
        if (counter > 0) --counter;
    }
    advance_cycles(cost);
}

void Vpmu::record_access(std::uint64_t address, bool is_instruction) {
    std::uint64_t cost = config_.probe_cost;
    if (is_instruction) {
        if (!l1i_.access(address)) {
            ++counters_[EventKind::L1_ICM];
            cost += config_.l1_miss_penalty;
            if (!l2_.access(address)) {
                ++counters_[EventKind::L2_TCM];
                cost += config_.l2_miss_penalty;
            }
        }
    } else {
        ++counters_[EventKind::L1_DCA];
        if (!l1d_.access(address)) {
            ++counters_[EventKind::L1_DCM];
            cost += config_.l1_miss_penalty;
            ++counters_[EventKind::L2_DCA];
            if (!l2_.access(address)) {
                ++counters_[EventKind::L2_DCM];
                ++counters_[EventKind::L2_TCM];
                cost += config_.l2_miss_penalty;
            }
        }
    }
    advance_cycles(cost);
}

void Vpmu::checkpoint(std::uint32_t id) {
    auto last_it = checkpoint_last_.try_emplace(id, CounterVector{}).first;
    const std::uint32_t hit_idx = checkpoint_hits_[id]++;
    CheckpointHit hit;
    hit.id = id;
    hit.hit_idx = hit_idx;
    hit.delta = counters_.delta_since(last_it->second);
    checkpoint_log_.push_back(hit);
    last_it->second = counters_;
}

}  // namespace csign
