#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "countersign/rng.hpp"

namespace csign {

inline constexpr std::size_t kMaxInputLen = 4096;

/// One mutation of a non-empty input. Operators: bit flip, byte set,
/// 8/16/32-bit bounded arithmetic (+-1..35), interesting-value splice
/// (0, 1, -1, MAX), block duplicate/delete, and 2-input splice with
/// splice_pool. Output length stays within [1, 4096]; a delete that would
/// empty the input falls back to a bit flip.
std::vector<std::uint8_t> mutate(std::span<const std::uint8_t> input, Rng& rng,
                                 std::span<const std::vector<std::uint8_t>> splice_pool = {});

}  // namespace csign
