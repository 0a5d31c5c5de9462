#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace csign {

/// The eight virtual performance counter events. Ordinal order is part of
/// the contract: the PC ensemble splits members over ordinals 0-3 and 4-7,
/// and CSV columns follow this order.
enum class EventKind : std::uint8_t {
    CYCLES = 0,
    L2_TCM = 1,  // L2 total cache misses (instruction + data)
    BR_MSP = 2,  // branch mispredictions
    L1_ICM = 3,  // L1 instruction cache misses
    L1_DCA = 4,  // L1 data cache accesses
    L2_DCA = 5,  // L2 data cache accesses
    L1_DCM = 6,  // L1 data cache misses
    L2_DCM = 7,  // L2 data cache misses
};

inline constexpr std::size_t kEventCount = 8;

inline constexpr std::array<std::string_view, kEventCount> kEventNames = {
    "CYCLES", "L2_TCM", "BR_MSP", "L1_ICM",
    "L1_DCA", "L2_DCA", "L1_DCM", "L2_DCM",
};

constexpr std::size_t event_index(EventKind kind) {
    return static_cast<std::size_t>(kind);
}

/// Cumulative event counts at an instant of a run, plus the virtual cycle
/// clock. All counts are monotonically non-decreasing over a run.
struct CounterVector {
    std::array<std::uint64_t, kEventCount> counts{};
    std::uint64_t virtual_cycle = 0;

    std::uint64_t& operator[](EventKind kind) { return counts[event_index(kind)]; }
    std::uint64_t operator[](EventKind kind) const { return counts[event_index(kind)]; }

    /// Component-wise difference; caller guarantees *this >= earlier.
    CounterVector delta_since(const CounterVector& earlier) const {
        CounterVector d;
        for (std::size_t i = 0; i < kEventCount; ++i) {
            d.counts[i] = counts[i] - earlier.counts[i];
        }
        d.virtual_cycle = virtual_cycle - earlier.virtual_cycle;
        return d;
    }

    bool operator==(const CounterVector&) const = default;
};

}  // namespace csign
