#include "countersign/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace csign {
namespace {

// Merge sort counting inversions (pairs out of order).
std::uint64_t sort_and_count(std::vector<double>& v, std::vector<double>& scratch,
                             std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = sort_and_count(v, scratch, lo, mid) + sort_and_count(v, scratch, mid, hi);
    std::size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            count += mid - a;
            scratch[out++] = v[b++];
        } else {
            scratch[out++] = v[a++];
        }
    }
    while (a < mid) scratch[out++] = v[a++];
    while (b < hi) scratch[out++] = v[b++];
    std::copy(scratch.begin() + lo, scratch.begin() + hi, v.begin() + lo);
    return count;
}

std::uint64_t tie_pairs(std::span<const double> sorted_values) {
    std::uint64_t pairs = 0;
    std::size_t i = 0;
    while (i < sorted_values.size()) {
        std::size_t j = i + 1;
        while (j < sorted_values.size() && sorted_values[j] == sorted_values[i]) ++j;
        const std::uint64_t g = j - i;
        pairs += g * (g - 1) / 2;
        i = j;
    }
    return pairs;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("kendall_tau: need at least 2 samples");

    // Sort index order by (x, y).
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Tie counts: x ties, joint (x, y) ties, y ties.
    std::uint64_t tx = 0, txy = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i + 1;
            while (j < n && x[order[j]] == x[order[i]]) ++j;
            const std::uint64_t g = j - i;
            tx += g * (g - 1) / 2;
            std::size_t a = i;
            while (a < j) {
                std::size_t b = a + 1;
                while (b < j && y[order[b]] == y[order[a]]) ++b;
                const std::uint64_t gj = b - a;
                txy += gj * (gj - 1) / 2;
                a = b;
            }
            i = j;
        }
    }

    std::vector<double> y_in_x_order(n);
    for (std::size_t i = 0; i < n; ++i) y_in_x_order[i] = y[order[i]];

    std::vector<double> y_sorted = y_in_x_order;
    std::vector<double> scratch(n);
    const std::uint64_t swaps = sort_and_count(y_sorted, scratch, 0, n);
    const std::uint64_t ty = tie_pairs(y_sorted);

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::int64_t concordant_minus_discordant =
        static_cast<std::int64_t>(n0) - static_cast<std::int64_t>(tx) -
        static_cast<std::int64_t>(ty) + static_cast<std::int64_t>(txy) -
        2 * static_cast<std::int64_t>(swaps);

    const std::uint64_t denom_x = n0 - tx;
    const std::uint64_t denom_y = n0 - ty;
    if (denom_x == 0 || denom_y == 0) return 0.0;
    return static_cast<double>(concordant_minus_discordant) /
           std::sqrt(static_cast<double>(denom_x) * static_cast<double>(denom_y));
}

double mean(std::span<const double> x) {
    double sum = 0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    const double mu = mean(x);
    double acc = 0;
    for (double v : x) acc += (v - mu) * (v - mu);
    return acc / static_cast<double>(x.size());
}

double kurtosis(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("kurtosis: need at least 2 samples");
    const double mu = mean(x);
    double m2 = 0, m4 = 0;
    for (double v : x) {
        const double d = v - mu;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(x.size());
    m2 /= n;
    m4 /= n;
    if (m2 < 1e-12) return 0.0;
    return m4 / (m2 * m2);
}

}  // namespace csign
