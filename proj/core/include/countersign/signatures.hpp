#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "countersign/events.hpp"

namespace csign {

/// Per-interval counter deltas sampled from one monitored run.
/// rows.size() == floor(t_m / t_s) + 1; the last row covers the partial
/// final interval (all zero when the run landed exactly on a boundary).
struct TimeSeriesSignature {
    std::uint64_t t_s = 0;  // sampling interval, virtual cycles
    std::uint64_t t_m = 0;  // monitored period, virtual cycles
    std::vector<std::array<std::uint64_t, kEventCount>> rows;
    // Cycles actually covered by the tail row beyond the last full boundary.
    std::uint64_t tail_cycles = 0;
    bool partial_tail = true;

    std::size_t sample_count() const { return rows.size(); }
};

/// One row of the checkpoint signature: the counter delta observed at one
/// checkpoint hit of one seeded run.
struct CheckpointRow {
    std::uint32_t seed_id = 0;
    std::uint32_t checkpoint_id = 0;
    std::uint32_t hit_idx = 0;
    std::array<std::uint64_t, kEventCount> delta{};
};

/// Concatenated checkpoint logs over a seed corpus. For a fixed program,
/// input set and VPMU config the rows are byte-identical across runs.
struct CheckpointSignature {
    std::vector<CheckpointRow> rows;
    struct SkippedSeed {
        std::uint32_t seed_id;
        std::string error;
    };
    std::vector<SkippedSeed> skipped;
};

std::string to_csv(const TimeSeriesSignature& sig);
std::string to_csv(const CheckpointSignature& sig);

TimeSeriesSignature time_series_from_csv(std::istream& in, std::uint64_t t_s,
                                         std::uint64_t t_m);
CheckpointSignature checkpoint_from_csv(std::istream& in);

}  // namespace csign
