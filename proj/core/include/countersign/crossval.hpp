#pragma once

#include <cstdint>
#include <vector>

#include "countersign/ensemble.hpp"

namespace csign {

struct CrossValidationResult {
    std::vector<std::vector<std::uint32_t>> folds;  // seed ids per fold
    std::vector<double> fold_scores;                // held-out trusted accuracy
    std::uint32_t chosen_fold = 0;
    std::vector<std::uint32_t> chosen_seeds;        // Y_s
    double mean_accuracy = 0.0;
};

/// Three-fold cross validation over trusted checkpoint features. Seeds are
/// split round-robin by sorted seed id; each fold's score is the fraction
/// of its held-out rows the ensemble (trained on the other folds) labels
/// trusted. Y_s is the best-scoring fold's seed set (ties: lowest fold).
CrossValidationResult cross_validate_pc(const FeatureMatrix& trusted_pc_features,
                                        std::uint32_t folds, double gamma, double nu,
                                        const StandardizationStats* fitted_stats = nullptr);

}  // namespace csign
