#include "countersign/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <stdexcept>
#include <unordered_map>

namespace csign {
namespace {

// Contract tolerance is 1e-6; the solver drives the violation two orders
// tighter so the decision function is reproducible under row permutation.
constexpr double kKktTolerance = 1e-10;
constexpr double kAlphaEps = 1e-12;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// Kernel row cache, FIFO bounded. Row i holds k(x_i, x_j) for all j.
class KernelCache {
public:
    KernelCache(const std::vector<std::vector<double>>& rows, double gamma,
                std::size_t capacity)
        : rows_(rows), gamma_(gamma), capacity_(capacity) {}

    const std::vector<double>& row(std::size_t i) {
        auto it = cache_.find(i);
        if (it != cache_.end()) return it->second;
        if (cache_.size() >= capacity_) {
            cache_.erase(fifo_.front());
            fifo_.pop_front();
        }
        std::vector<double> values(rows_.size());
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            values[j] = std::exp(-gamma_ * squared_distance(rows_[i], rows_[j]));
        }
        fifo_.push_back(i);
        return cache_.emplace(i, std::move(values)).first->second;
    }

private:
    const std::vector<std::vector<double>>& rows_;
    double gamma_;
    std::size_t capacity_;
    std::unordered_map<std::size_t, std::vector<double>> cache_;
    std::list<std::size_t> fifo_;
};

}  // namespace

double decision_value(const OneClassSvmModel& model, std::span<const double> standardized_row) {
    double acc = 0;
    for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
        double d2 = 0;
        const auto& sv = model.support_vectors[s];
        for (std::size_t c = 0; c < sv.size(); ++c) {
            const double d = sv[c] - standardized_row[c];
            d2 += d * d;
        }
        acc += model.alphas[s] * std::exp(-model.gamma * d2);
    }
    return acc - model.rho;
}

OneClassSvmModel train_ocsvm(const FeatureMatrix& features, double gamma, double nu,
                             const CounterSelection& selection,
                             const StandardizationStats* fitted_stats) {
    const std::size_t rows = features.rows.size();
    if (rows < 10) throw std::invalid_argument("train_ocsvm: need at least 10 rows");
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("train_ocsvm: nu out of (0,1]");
    if (!(gamma > 0.0)) throw std::invalid_argument("train_ocsvm: gamma must be positive");

    OneClassSvmModel model;
    model.gamma = gamma;
    model.nu = nu;
    model.selection = selection;
    model.training_rows = rows;
    model.standardization = fitted_stats ? *fitted_stats : fit_standardize(features);
    const StandardizedMatrix standardized = apply_standardize(features, model.standardization);
    const auto& data = standardized.matrix.rows;

    const double box = 1.0 / (nu * static_cast<double>(rows));

    // Initialization: box-full alphas on the first floor(nu*l) rows, the
    // remainder of the unit mass on the next row.
    std::vector<double> alpha(rows, 0.0);
    const std::size_t full = static_cast<std::size_t>(nu * static_cast<double>(rows));
    double assigned = 0.0;
    for (std::size_t i = 0; i < full && i < rows; ++i) {
        alpha[i] = box;
        assigned += box;
    }
    if (assigned < 1.0 && full < rows) alpha[full] = 1.0 - assigned;

    KernelCache cache(data, gamma, std::min<std::size_t>(rows, 768));

    // Gradient g = Q alpha.
    std::vector<double> g(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        if (alpha[i] <= 0.0) continue;
        const auto& row = cache.row(i);
        for (std::size_t j = 0; j < rows; ++j) g[j] += alpha[i] * row[j];
    }

    const std::uint64_t max_steps = 1000000ULL * static_cast<std::uint64_t>(rows);
    double violation = 0.0;
    bool converged = false;
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        // Most violating pair under the equality constraint: raise the
        // smallest gradient among raisable alphas, lower the largest among
        // lowerable ones. Deterministic: first index wins ties.
        std::size_t up = rows, down = rows;
        for (std::size_t i = 0; i < rows; ++i) {
            if (alpha[i] < box - kAlphaEps && (up == rows || g[i] < g[up])) up = i;
            if (alpha[i] > kAlphaEps && (down == rows || g[i] > g[down])) down = i;
        }
        if (up == rows || down == rows) {
            violation = 0.0;
            converged = true;
            break;
        }
        violation = g[down] - g[up];
        if (violation <= kKktTolerance) {
            converged = true;
            break;
        }

        const auto& row_up = cache.row(up);
        const auto& row_down = cache.row(down);
        const double curvature = row_up[up] + row_down[down] - 2.0 * row_up[down];
        double delta = curvature > 1e-15 ? violation / curvature
                                         : std::min(box - alpha[up], alpha[down]);
        delta = std::min(delta, std::min(box - alpha[up], alpha[down]));
        alpha[up] += delta;
        alpha[down] -= delta;
        for (std::size_t j = 0; j < rows; ++j) {
            g[j] += delta * (row_up[j] - row_down[j]);
        }
    }
    if (!converged) {
        throw std::runtime_error("train_ocsvm: no convergence, KKT violation " +
                                 std::to_string(violation));
    }
    model.kkt_residual = violation;

    // rho: mean decision value over margin vectors, median over all support
    // vectors if none sit strictly inside the box.
    std::vector<double> margin_values;
    std::vector<double> support_values;
    for (std::size_t i = 0; i < rows; ++i) {
        if (alpha[i] > kAlphaEps) {
            support_values.push_back(g[i]);
            if (alpha[i] < box - kAlphaEps) margin_values.push_back(g[i]);
        }
    }
    if (!margin_values.empty()) {
        double sum = 0;
        for (double v : margin_values) sum += v;
        model.rho = sum / static_cast<double>(margin_values.size());
    } else {
        std::sort(support_values.begin(), support_values.end());
        model.rho = support_values[support_values.size() / 2];
    }

    for (std::size_t i = 0; i < rows; ++i) {
        if (alpha[i] > kAlphaEps) {
            model.support_vectors.push_back(data[i]);
            model.alphas.push_back(alpha[i]);
        }
    }
    return model;
}

SvmPrediction predict(const OneClassSvmModel& model, const FeatureMatrix& rows) {
    if (!rows.rows.empty() && !model.support_vectors.empty() &&
        rows.rows[0].size() != model.support_vectors[0].size()) {
        throw std::invalid_argument("predict: row width does not match the model");
    }
    const StandardizedMatrix standardized = apply_standardize(rows, model.standardization);
    SvmPrediction out;
    out.labels.reserve(rows.rows.size());
    out.decisions.reserve(rows.rows.size());
    out.novelty = standardized.novelty;
    for (const auto& row : standardized.matrix.rows) {
        const double value = decision_value(model, row);
        out.decisions.push_back(value);
        out.labels.push_back(value >= 0.0 ? +1 : -1);
    }
    return out;
}

}  // namespace csign
