#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "countersign/features.hpp"
#include "countersign/select.hpp"

namespace csign {

/// One-class SVM (Scholkopf formulation) with RBF kernel
/// k(x,y) = exp(-gamma ||x-y||^2). Dual: min 1/2 a^T Q a subject to
/// 0 <= a_i <= 1/(nu*l), sum a_i = 1. decision(x) = sum a_i k(s_i, x) - rho,
/// label +1 iff decision >= 0 (the boundary is trusted).
struct OneClassSvmModel {
    std::vector<std::vector<double>> support_vectors;  // standardized rows
    std::vector<double> alphas;
    double rho = 0.0;
    double gamma = 0.0;
    double nu = 0.0;
    StandardizationStats standardization;
    CounterSelection selection;
    double kkt_residual = 0.0;
    std::size_t training_rows = 0;
};

struct SvmPrediction {
    std::vector<int> labels;        // +1 trusted / -1 subverted
    std::vector<double> decisions;  // raw decision values
    std::vector<bool> novelty;      // unseen checkpoint id at standardization
};

/// Trains by deterministic most-violating-pair coordinate descent with KKT
/// tolerance 1e-6. Standardization is fitted on the (trusted) training
/// matrix unless pre-fitted stats are supplied (the pipeline fits them on
/// the full trusted collection so held-out seeds with rare checkpoint
/// groups do not false-flag as novel). Throws on non-convergence at the
/// iteration cap, carrying the final KKT violation in the message.
OneClassSvmModel train_ocsvm(const FeatureMatrix& features, double gamma, double nu,
                             const CounterSelection& selection = {},
                             const StandardizationStats* fitted_stats = nullptr);

/// Applies the stored standardization, then the decision rule. Throws on
/// row width mismatch.
SvmPrediction predict(const OneClassSvmModel& model, const FeatureMatrix& rows);

double decision_value(const OneClassSvmModel& model, std::span<const double> standardized_row);

}  // namespace csign
