#include "countersign/crossval.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace csign {

CrossValidationResult cross_validate_pc(const FeatureMatrix& trusted_pc_features,
                                        std::uint32_t folds, double gamma, double nu,
                                        const StandardizationStats* fitted_stats) {
    if (folds < 2) throw std::invalid_argument("cross_validate_pc: need >= 2 folds");
    std::set<std::uint32_t> seed_set;
    for (const auto& key : trusted_pc_features.keys) seed_set.insert(key.seed_id);
    if (seed_set.size() < folds) {
        throw std::invalid_argument("cross_validate_pc: fewer distinct seeds than folds");
    }

    CrossValidationResult result;
    result.folds.assign(folds, {});
    std::size_t rank = 0;
    for (std::uint32_t seed : seed_set) {
        result.folds[rank % folds].push_back(seed);
        ++rank;
    }

    auto rows_for = [&](const std::vector<std::uint32_t>& seeds, bool invert) {
        const std::set<std::uint32_t> wanted(seeds.begin(), seeds.end());
        FeatureMatrix out;
        out.column_labels = trusted_pc_features.column_labels;
        for (std::size_t r = 0; r < trusted_pc_features.rows.size(); ++r) {
            const bool in_fold = wanted.count(trusted_pc_features.keys[r].seed_id) > 0;
            if (in_fold != invert) {
                out.rows.push_back(trusted_pc_features.rows[r]);
                out.keys.push_back(trusted_pc_features.keys[r]);
            }
        }
        return out;
    };

    double total = 0.0;
    for (std::uint32_t f = 0; f < folds; ++f) {
        const FeatureMatrix train = rows_for(result.folds[f], /*invert=*/true);
        const FeatureMatrix held_out = rows_for(result.folds[f], /*invert=*/false);
        const EnsembleModel model = train_ensemble(train, gamma, nu, fitted_stats);
        const SvmPrediction prediction = predict(model, held_out);
        std::size_t trusted = 0;
        for (int label : prediction.labels) trusted += (label > 0);
        const double score = prediction.labels.empty()
                                 ? 0.0
                                 : static_cast<double>(trusted) /
                                       static_cast<double>(prediction.labels.size());
        result.fold_scores.push_back(score);
        total += score;
    }
    result.mean_accuracy = total / static_cast<double>(folds);

    result.chosen_fold = 0;
    for (std::uint32_t f = 1; f < folds; ++f) {
        if (result.fold_scores[f] > result.fold_scores[result.chosen_fold]) {
            result.chosen_fold = f;
        }
    }
    result.chosen_seeds = result.folds[result.chosen_fold];
    return result;
}

}  // namespace csign
