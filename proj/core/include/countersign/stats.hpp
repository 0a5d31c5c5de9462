#pragma once

#include <cstdint>
#include <span>

namespace csign {

/// Tie-corrected Kendall tau-b of two equal-length sequences:
/// (C - D) / sqrt((n0 - Tx) * (n0 - Ty)). Returns 0 when either sequence is
/// all ties. O(n log n) via merge-sort inversion counting; all pair counts
/// are exact integers, so the result matches the O(n^2) definition bit for
/// bit. Throws std::invalid_argument on length mismatch or n < 2.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Pearson (non-excess) sample kurtosis m4 / m2^2 with population moments.
/// Degenerate windows (m2 < 1e-12) map to 0. Requires n >= 2.
double kurtosis(std::span<const double> x);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // population (divide by n)

}  // namespace csign
