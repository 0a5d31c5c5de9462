#include "countersign/ensemble.hpp"

#include <algorithm>
#include <stdexcept>

namespace csign {

FeatureMatrix project_columns(const FeatureMatrix& matrix,
                              const std::vector<std::size_t>& columns) {
    FeatureMatrix out;
    out.keys = matrix.keys;
    out.dropped_windows = matrix.dropped_windows;
    for (std::size_t c : columns) out.column_labels.push_back(matrix.column_labels[c]);
    out.rows.reserve(matrix.rows.size());
    for (const auto& row : matrix.rows) {
        std::vector<double> projected;
        projected.reserve(columns.size());
        for (std::size_t c : columns) projected.push_back(row[c]);
        out.rows.push_back(std::move(projected));
    }
    return out;
}

namespace {

StandardizationStats project_stats(const StandardizationStats& stats,
                                   const std::vector<std::size_t>& columns) {
    StandardizationStats out;
    auto take = [&columns](const std::vector<double>& src) {
        std::vector<double> dst;
        dst.reserve(columns.size());
        for (std::size_t c : columns) dst.push_back(src[c]);
        return dst;
    };
    out.mean = take(stats.mean);
    out.stddev = take(stats.stddev);
    for (const auto& [key, mean] : stats.checkpoint_mean) out.checkpoint_mean[key] = take(mean);
    for (const auto& [key, dev] : stats.checkpoint_stddev) {
        out.checkpoint_stddev[key] = take(dev);
    }
    return out;
}

}  // namespace

EnsembleModel train_ensemble(const FeatureMatrix& pc_features, double gamma, double nu,
                             const StandardizationStats* fitted_stats) {
    if (pc_features.rows.empty() || pc_features.rows[0].size() != kEventCount) {
        throw std::invalid_argument("train_ensemble: features must carry all 8 counters");
    }
    EnsembleModel model;
    model.member_columns = {{0, 1, 2, 3}, {4, 5, 6, 7}};
    for (const auto& columns : model.member_columns) {
        if (fitted_stats) {
            const StandardizationStats projected = project_stats(*fitted_stats, columns);
            model.members.push_back(
                train_ocsvm(project_columns(pc_features, columns), gamma, nu, {}, &projected));
        } else {
            model.members.push_back(
                train_ocsvm(project_columns(pc_features, columns), gamma, nu));
        }
    }
    return model;
}

SvmPrediction predict(const EnsembleModel& model, const FeatureMatrix& pc_features) {
    if (model.members.empty()) throw std::invalid_argument("predict: empty ensemble");
    SvmPrediction combined;
    bool first = true;
    for (std::size_t m = 0; m < model.members.size(); ++m) {
        const SvmPrediction part =
            predict(model.members[m], project_columns(pc_features, model.member_columns[m]));
        if (first) {
            combined = part;
            first = false;
            continue;
        }
        for (std::size_t r = 0; r < part.labels.size(); ++r) {
            // Unanimity-to-trust: any member's subverted vote wins.
            if (part.labels[r] < 0) combined.labels[r] = -1;
            combined.decisions[r] = std::min(combined.decisions[r], part.decisions[r]);
            if (part.novelty[r]) combined.novelty[r] = true;
        }
    }
    return combined;
}

}  // namespace csign
