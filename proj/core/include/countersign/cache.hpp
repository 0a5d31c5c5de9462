#pragma once

#include <cstdint>
#include <vector>

namespace csign {

/// Geometry of one set-associative cache level. line_bytes and sets must be
/// powers of two so an address maps to exactly one set.
struct CacheConfig {
    std::uint32_t sets = 128;
    std::uint32_t ways = 4;
    std::uint32_t line_bytes = 64;

    std::uint64_t capacity_bytes() const {
        return static_cast<std::uint64_t>(sets) * ways * line_bytes;
    }
};

/// Set-associative LRU cache. Tags only; a hit moves the tag to the MRU
/// position, a miss evicts the LRU tag when the set is full.
class CacheModel {
public:
    explicit CacheModel(const CacheConfig& config);

    /// Probes one address. Returns true on hit. State is always updated.
    bool access(std::uint64_t address);

    const CacheConfig& config() const { return config_; }

    void reset();

private:
    CacheConfig config_;
    std::uint32_t line_shift_ = 0;
    std::uint32_t set_shift_ = 0;
    std::uint32_t set_mask_ = 0;
    // Per set: tags ordered MRU first. Sets are stored contiguously,
    // occupancy tracked separately so empty slots never match.
    std::vector<std::uint64_t> tags_;
    std::vector<std::uint8_t> used_;
};

}  // namespace csign
