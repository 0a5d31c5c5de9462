#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "countersign/probes.hpp"

namespace csign {

/// AFL-style hit-count bucketing: 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+.
std::uint8_t hit_bucket(std::uint32_t hits);

/// Edge trace of a single execution. Records the (previous block, current
/// block) transition count per 16-bit slot; slot = prev XOR rotl1(cur).
class ExecTrace final : public CoverageSink {
public:
    static constexpr std::size_t kSlots = 65536;

    ExecTrace();
    void on_block(std::uint32_t block_id) override;
    void reset();

    const std::vector<std::uint32_t>& touched_slots() const { return touched_; }
    std::uint32_t hits(std::uint32_t slot) const { return hits_[slot]; }
    const std::set<std::uint32_t>& blocks() const { return blocks_; }

    /// Order-stable fingerprint of (slot, bucket) pairs.
    std::string digest() const;

private:
    std::vector<std::uint32_t> hits_;
    std::vector<std::uint32_t> touched_;
    std::set<std::uint32_t> blocks_;
    std::uint32_t prev_block_ = 0;
};

/// Global coverage state of a fuzzing campaign: bucketed edge hit counts
/// over a fixed 65536-slot map plus the set of seen blocks.
class CoverageMap {
public:
    static constexpr std::size_t kSlots = ExecTrace::kSlots;

    CoverageMap();

    /// Folds one execution trace in. Returns true iff some edge reached a
    /// strictly higher bucket than the stored one (new coverage).
    bool update(const ExecTrace& trace);

    std::size_t edge_count() const { return edges_; }
    std::size_t block_count() const { return seen_blocks_.size(); }
    std::uint8_t bucket(std::uint32_t slot) const { return buckets_[slot]; }
    const std::set<std::uint32_t>& seen_blocks() const { return seen_blocks_; }

private:
    std::vector<std::uint8_t> buckets_;
    std::set<std::uint32_t> seen_blocks_;
    std::size_t edges_ = 0;
};

}  // namespace csign
