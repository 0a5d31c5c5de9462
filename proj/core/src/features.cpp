#include "countersign/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "countersign/stats.hpp"

namespace csign {
namespace {

constexpr double kSigmaFloor = 1e-9;

std::string label_for(const char* stat, EventKind kind) {
    return std::string(stat) + "_" + std::string(kEventNames[event_index(kind)]);
}

}  // namespace

std::string FeatureMatrix::to_csv() const {
    std::string out;
    const bool keyed = !keys.empty();
    if (keyed) out += "seed_id,checkpoint_id,hit_idx";
    for (std::size_t c = 0; c < column_labels.size(); ++c) {
        if (c > 0 || keyed) out += ',';
        out += column_labels[c];
    }
    out += '\n';
    char buf[64];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (keyed) {
            out += std::to_string(keys[r].seed_id);
            out += ',';
            out += std::to_string(keys[r].checkpoint_id);
            out += ',';
            out += std::to_string(keys[r].hit_idx);
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c > 0 || keyed) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", rows[r][c]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

StandardizationStats fit_standardize(const FeatureMatrix& matrix) {
    if (matrix.rows.empty()) throw std::invalid_argument("fit_standardize: empty matrix");
    const std::size_t cols = matrix.rows[0].size();

    StandardizationStats stats;
    auto fit_group = [cols](const std::vector<const std::vector<double>*>& rows,
                            std::vector<double>& mean_out, std::vector<double>& std_out) {
        mean_out.assign(cols, 0.0);
        std_out.assign(cols, 0.0);
        for (const auto* row : rows) {
            for (std::size_t c = 0; c < cols; ++c) mean_out[c] += (*row)[c];
        }
        for (auto& m : mean_out) m /= static_cast<double>(rows.size());
        for (const auto* row : rows) {
            for (std::size_t c = 0; c < cols; ++c) {
                const double d = (*row)[c] - mean_out[c];
                std_out[c] += d * d;
            }
        }
        for (auto& s : std_out) {
            s = std::sqrt(s / static_cast<double>(rows.size()));
            if (s < kSigmaFloor) s = kSigmaFloor;
        }
    };

    std::vector<const std::vector<double>*> all;
    all.reserve(matrix.rows.size());
    for (const auto& row : matrix.rows) all.push_back(&row);
    fit_group(all, stats.mean, stats.stddev);

    if (!matrix.keys.empty()) {
        std::map<std::uint32_t, std::vector<const std::vector<double>*>> groups;
        for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
            const auto key = StandardizationStats::group_key(matrix.keys[r].checkpoint_id,
                                                             matrix.keys[r].hit_idx);
            groups[key].push_back(&matrix.rows[r]);
        }
        for (const auto& [cp, rows] : groups) {
            fit_group(rows, stats.checkpoint_mean[cp], stats.checkpoint_stddev[cp]);
        }
    }
    return stats;
}

StandardizedMatrix apply_standardize(const FeatureMatrix& matrix,
                                     const StandardizationStats& stats) {
    StandardizedMatrix out;
    out.matrix = matrix;
    out.novelty.assign(matrix.rows.size(), false);
    const bool per_checkpoint = !stats.checkpoint_mean.empty() && !matrix.keys.empty();
    for (std::size_t r = 0; r < out.matrix.rows.size(); ++r) {
        const std::vector<double>* mu = &stats.mean;
        const std::vector<double>* sigma = &stats.stddev;
        if (per_checkpoint) {
            const auto key = StandardizationStats::group_key(matrix.keys[r].checkpoint_id,
                                                             matrix.keys[r].hit_idx);
            const auto it = stats.checkpoint_mean.find(key);
            if (it == stats.checkpoint_mean.end()) {
                out.novelty[r] = true;  // unseen checkpoint group: global stats
            } else {
                mu = &it->second;
                sigma = &stats.checkpoint_stddev.at(key);
            }
        }
        auto& row = out.matrix.rows[r];
        if (row.size() != mu->size()) {
            throw std::invalid_argument("apply_standardize: column count mismatch");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            row[c] = (row[c] - (*mu)[c]) / (*sigma)[c];
        }
    }
    return out;
}

FeatureMatrix ts_features(const TimeSeriesSignature& signature, std::size_t t_len,
                          std::size_t t_shift, const CounterSelection& selection) {
    if (t_shift < 1) throw std::invalid_argument("ts_features: t_shift must be >= 1");
    if (t_len < 2) throw std::invalid_argument("ts_features: t_len must be >= 2 samples");
    if (t_shift > t_len) throw std::invalid_argument("ts_features: need overlap (t_shift <= t_len)");
    const std::size_t n = signature.rows.size();
    if (n < 2) throw std::invalid_argument("ts_features: signature too short");

    FeatureMatrix out;
    for (EventKind kind : selection.chosen) {
        out.column_labels.push_back(label_for("mean", kind));
        out.column_labels.push_back(label_for("kurt", kind));
        out.column_labels.push_back(label_for("tau", kind));
        out.column_labels.push_back(label_for("max", kind));
    }

    const std::size_t window_count = (n - 1) / t_shift + 1;
    std::vector<double> values;
    std::vector<double> index;
    for (std::size_t w = 0; w < window_count; ++w) {
        const std::size_t start = w * t_shift;
        const std::size_t end = std::min(start + t_len, n);
        if (end - start < 2) {
            ++out.dropped_windows;
            continue;
        }
        std::vector<double> row;
        row.reserve(4 * selection.chosen.size());
        index.resize(end - start);
        for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<double>(i);
        for (EventKind kind : selection.chosen) {
            const std::size_t c = event_index(kind);
            values.resize(end - start);
            for (std::size_t i = start; i < end; ++i) {
                values[i - start] = static_cast<double>(signature.rows[i][c]);
            }
            const double max_val = *std::max_element(values.begin(), values.end());
            row.push_back(mean(values));
            row.push_back(kurtosis(values));
            row.push_back(kendall_tau(values, index));
            row.push_back(max_val);
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

FeatureMatrix pc_features(const CheckpointSignature& signature,
                          const CounterSelection& selection) {
    if (signature.rows.empty()) throw std::invalid_argument("pc_features: empty signature");
    FeatureMatrix out;
    for (EventKind kind : selection.chosen) {
        out.column_labels.push_back(label_for("pc", kind));
    }
    out.rows.reserve(signature.rows.size());
    out.keys.reserve(signature.rows.size());
    for (const CheckpointRow& row : signature.rows) {
        std::vector<double> features;
        features.reserve(selection.chosen.size());
        for (EventKind kind : selection.chosen) {
            features.push_back(static_cast<double>(row.delta[event_index(kind)]));
        }
        out.rows.push_back(std::move(features));
        out.keys.push_back({row.seed_id, row.checkpoint_id, row.hit_idx});
    }
    return out;
}

}  // namespace csign
