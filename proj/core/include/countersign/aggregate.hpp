#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace csign {

/// Majority aggregation over consecutive subsets of t labels. N = floor(n/t)
/// subsets; a subset is +1 iff its label sum is positive; the trailing
/// remainder is discarded. t must be odd (sum 0 is unreachable) and >= 1.
std::vector<int> aggregate_majority(const std::vector<int>& labels, std::uint32_t t);

/// Fraction of subsets whose label equals the run's ground-truth label.
double accuracy(const std::vector<int>& subset_labels, int truth);

/// Aggregated outcome of one detection path.
struct Verdict {
    std::vector<int> row_labels;
    std::vector<int> subset_labels;
    std::uint32_t threshold = 1;
    double pos_fraction = 0.0;  // subsets labeled +1
    double neg_fraction = 0.0;
    std::optional<double> accuracy_vs_truth;
    bool subverted = false;  // majority of subsets negative (ties: subverted)
};

Verdict make_verdict(const std::vector<int>& row_labels, std::uint32_t t,
                     std::optional<int> truth = std::nullopt);

}  // namespace csign
