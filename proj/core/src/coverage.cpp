#include "countersign/coverage.hpp"

#include <algorithm>

#include "countersign/primitives.hpp"

namespace csign {

std::uint8_t hit_bucket(std::uint32_t hits) {
    if (hits == 0) return 0;
    if (hits == 1) return 1;
    if (hits == 2) return 2;
    if (hits == 3) return 3;
    if (hits <= 7) return 4;
    if (hits <= 15) return 5;
    if (hits <= 31) return 6;
    if (hits <= 127) return 7;
    return 8;
}

ExecTrace::ExecTrace() : hits_(kSlots, 0) {}

void ExecTrace::on_block(std::uint32_t block_id) {
    const std::uint32_t cur = block_id & 0xffff;
    const std::uint32_t rotated = ((cur << 1) | (cur >> 15)) & 0xffff;
    const std::uint32_t slot = (prev_block_ ^ rotated) & 0xffff;
    if (hits_[slot] == 0) touched_.push_back(slot);
    ++hits_[slot];
    blocks_.insert(block_id);
    prev_block_ = cur;
}

void ExecTrace::reset() {
    for (std::uint32_t slot : touched_) hits_[slot] = 0;
    touched_.clear();
    blocks_.clear();
    prev_block_ = 0;
}

std::string ExecTrace::digest() const {
    // Slot order is first-touch order, which is deterministic per input.
    std::vector<std::uint8_t> bytes;
    bytes.reserve(touched_.size() * 5);
    std::vector<std::uint32_t> sorted(touched_);
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t slot : sorted) {
        bytes.push_back(static_cast<std::uint8_t>(slot));
        bytes.push_back(static_cast<std::uint8_t>(slot >> 8));
        bytes.push_back(hit_bucket(hits_[slot]));
    }
    return hex_digest(bytes, 8);
}

CoverageMap::CoverageMap() : buckets_(kSlots, 0) {}

bool CoverageMap::update(const ExecTrace& trace) {
    // New coverage means some edge reached a strictly higher bucket.
    bool new_coverage = false;
    for (std::uint32_t slot : trace.touched_slots()) {
        const std::uint8_t bucket = hit_bucket(trace.hits(slot));
        if (bucket > buckets_[slot]) {
            if (buckets_[slot] == 0) ++edges_;
            buckets_[slot] = bucket;
            new_coverage = true;
        }
    }
    for (std::uint32_t block : trace.blocks()) {
        seen_blocks_.insert(block);
    }
    return new_coverage;
}

}  // namespace csign
