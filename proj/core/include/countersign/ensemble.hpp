#pragma once

#include <vector>

#include "countersign/ocsvm.hpp"

namespace csign {

/// PC ensemble: one SVM per counter subset (event ordinals 0-3 and 4-7).
/// A row is trusted only when every member votes trusted; the row decision
/// value is the minimum member decision.
struct EnsembleModel {
    std::vector<OneClassSvmModel> members;
    std::vector<std::vector<std::size_t>> member_columns;
};

/// Requires the feature matrix to carry all 8 counters. Pre-fitted
/// standardization stats (full trusted collection) may be supplied; they
/// are projected onto each member's column subset.
EnsembleModel train_ensemble(const FeatureMatrix& pc_features, double gamma, double nu,
                             const StandardizationStats* fitted_stats = nullptr);

SvmPrediction predict(const EnsembleModel& model, const FeatureMatrix& pc_features);

FeatureMatrix project_columns(const FeatureMatrix& matrix,
                              const std::vector<std::size_t>& columns);

}  // namespace csign
