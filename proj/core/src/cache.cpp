#include "countersign/cache.hpp"

#include <stdexcept>

namespace csign {
namespace {

bool is_pow2(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::uint32_t log2_u32(std::uint32_t v) {
    std::uint32_t r = 0;
    while ((1u << r) < v) ++r;
    return r;
}

}  // namespace

CacheModel::CacheModel(const CacheConfig& config) : config_(config) {
    if (!is_pow2(config.sets) || !is_pow2(config.line_bytes)) {
        throw std::invalid_argument("cache sets and line_bytes must be powers of two");
    }
    if (config.ways == 0) {
        throw std::invalid_argument("cache ways must be >= 1");
    }
    line_shift_ = log2_u32(config.line_bytes);
    set_shift_ = log2_u32(config.sets);
    set_mask_ = config.sets - 1;
    tags_.assign(static_cast<std::size_t>(config.sets) * config.ways, 0);
    used_.assign(config.sets, 0);
}

void CacheModel::reset() {
    std::fill(tags_.begin(), tags_.end(), 0);
    std::fill(used_.begin(), used_.end(), 0);
}

bool CacheModel::access(std::uint64_t address) {
    const std::uint64_t line = address >> line_shift_;
    const std::uint32_t set = static_cast<std::uint32_t>(line) & set_mask_;
    const std::uint64_t tag = line >> set_shift_;

    std::uint64_t* row = &tags_[static_cast<std::size_t>(set) * config_.ways];
    const std::uint32_t occupied = used_[set];

    for (std::uint32_t i = 0; i < occupied; ++i) {
        if (row[i] == tag) {
            // Hit: rotate [0, i] right so tag lands at MRU position 0.
            for (std::uint32_t j = i; j > 0; --j) row[j] = row[j - 1];
            row[0] = tag;
            return true;
        }
    }

    // Miss: insert at MRU, dropping the LRU entry if the set is full.
    const std::uint32_t new_size = occupied < config_.ways ? occupied + 1 : config_.ways;
    for (std::uint32_t j = new_size - 1; j > 0; --j) row[j] = row[j - 1];
    row[0] = tag;
    used_[set] = static_cast<std::uint8_t>(new_size);
    return false;
}

}  // namespace csign
