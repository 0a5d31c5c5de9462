#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "countersign/crossval.hpp"
#include "countersign/ensemble.hpp"
#include "countersign/ocsvm.hpp"

namespace csign {

/// The persisted model document: both detectors, the counter selection,
/// thresholds, cross-validation outcome, the time-series input, and the
/// expected checkpoint hit counts of the chosen seeds (the deterministic
/// replay manifest the spatial check reconciles against).
struct ModelDocument {
    int schema_version = 1;
    std::string scheme;
    std::string config_digest;

    CounterSelection selection;

    OneClassSvmModel ts_model;
    double ts_holdout_accuracy = 0.0;

    EnsembleModel pc_ensemble;
    CrossValidationResult cv;

    std::uint32_t t_ts = 41;
    std::uint32_t t_pc = 31;

    std::vector<std::uint8_t> ts_input;
    // (corpus seed id, checkpoint id) -> hits per run, for Y_s seeds.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> expected_hits;

    std::string to_json() const;
    static ModelDocument from_json(const std::string& text);

    /// Digest of the serialized document (artifact integrity).
    std::string digest() const;
};

}  // namespace csign
