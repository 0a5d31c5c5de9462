#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "countersign/select.hpp"
#include "countersign/signatures.hpp"

namespace csign {

/// Feature rows plus provenance. Checkpoint rows carry (seed, checkpoint,
/// hit) keys for per-checkpoint standardization and spatial aggregation;
/// time-series rows have no keys.
struct FeatureMatrix {
    std::vector<std::string> column_labels;
    std::vector<std::vector<double>> rows;

    struct RowKey {
        std::uint32_t seed_id = 0;
        std::uint32_t checkpoint_id = 0;
        std::uint32_t hit_idx = 0;
    };
    std::vector<RowKey> keys;  // empty for time-series features

    std::size_t dropped_windows = 0;

    std::string to_csv() const;
};

/// Column statistics fitted on trusted data only. For checkpoint features
/// the statistics are keyed per checkpoint (split into first-hit and
/// repeat-hit pools: the first hit of an id spans back to the run start,
/// repeat hits are loop-local, and pooling the two spans would inflate the
/// scale); unseen groups standardize with the global column statistics and
/// set a novelty flag. Standard deviations are floored at 1e-9.
struct StandardizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::map<std::uint32_t, std::vector<double>> checkpoint_mean;
    std::map<std::uint32_t, std::vector<double>> checkpoint_stddev;

    /// Group key: checkpoint id with a first-hit/repeat-hit bit.
    static std::uint32_t group_key(std::uint32_t checkpoint_id, std::uint32_t hit_idx) {
        return (checkpoint_id << 1) | (hit_idx > 0 ? 1u : 0u);
    }
};

StandardizationStats fit_standardize(const FeatureMatrix& matrix);

struct StandardizedMatrix {
    FeatureMatrix matrix;
    std::vector<bool> novelty;  // per row: checkpoint id unseen at fit time
};

StandardizedMatrix apply_standardize(const FeatureMatrix& matrix,
                                     const StandardizationStats& stats);

/// Sliding-window time-series features (units: samples). Window i spans
/// [i*t_shift, i*t_shift + t_len) clamped to the signature; windows left
/// with fewer than 2 samples are dropped and counted. Per selected counter:
/// mean, kurtosis, Kendall tau against the sample index, max (row width 4Z).
FeatureMatrix ts_features(const TimeSeriesSignature& signature, std::size_t t_len,
                          std::size_t t_shift, const CounterSelection& selection);

/// One row per checkpoint signature row, restricted to the selected counters.
FeatureMatrix pc_features(const CheckpointSignature& signature,
                          const CounterSelection& selection);

}  // namespace csign
