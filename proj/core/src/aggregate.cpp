#include "countersign/aggregate.hpp"

#include <stdexcept>

namespace csign {

std::vector<int> aggregate_majority(const std::vector<int>& labels, std::uint32_t t) {
    if (t < 1 || t % 2 == 0) throw std::invalid_argument("aggregate_majority: t must be odd >= 1");
    if (labels.size() < t) throw std::invalid_argument("aggregate_majority: fewer labels than t");
    const std::size_t subsets = labels.size() / t;
    std::vector<int> out;
    out.reserve(subsets);
    for (std::size_t s = 0; s < subsets; ++s) {
        int sum = 0;
        for (std::size_t i = s * t; i < (s + 1) * t; ++i) sum += labels[i];
        out.push_back(sum > 0 ? +1 : -1);
    }
    return out;
}

double accuracy(const std::vector<int>& subset_labels, int truth) {
    if (subset_labels.empty()) throw std::invalid_argument("accuracy: no subsets");
    std::size_t correct = 0;
    for (int label : subset_labels) correct += (label == truth);
    return static_cast<double>(correct) / static_cast<double>(subset_labels.size());
}

Verdict make_verdict(const std::vector<int>& row_labels, std::uint32_t t,
                     std::optional<int> truth) {
    Verdict v;
    v.row_labels = row_labels;
    v.threshold = t;
    v.subset_labels = aggregate_majority(row_labels, t);
    std::size_t pos = 0;
    for (int label : v.subset_labels) pos += (label > 0);
    v.pos_fraction = static_cast<double>(pos) / static_cast<double>(v.subset_labels.size());
    v.neg_fraction = 1.0 - v.pos_fraction;
    if (truth.has_value()) v.accuracy_vs_truth = accuracy(v.subset_labels, *truth);
    v.subverted = v.pos_fraction <= 0.5;
    return v;
}

}  // namespace csign
