#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "countersign/params.hpp"
#include "countersign/select.hpp"
#include "countersign/vpmu.hpp"

namespace csign {

/// Everything one pipeline run needs. Serialized field-for-field as JSON;
/// the offline-relevant subset (everything except variant, paths and the
/// experiment grid) is hashed into config_digest, which artifacts record
/// and detection verifies.
struct PipelineConfig {
    SchemeId scheme = SchemeId::LATTICE;
    SubversionVariant variant = SubversionVariant::TRUSTED;  // experiment harness

    VpmuConfig vpmu;

    struct Fuzz {
        std::uint64_t budget_execs = 20000;
        std::uint64_t rng_seed = 0x5eed;
        std::vector<std::vector<std::uint8_t>> initial_inputs;
    } fuzz;

    struct Sampling {
        std::uint64_t t_m = 45'000'000;
        std::uint64_t t_s = 500;
    } sampling;

    struct Features {
        std::size_t t_len = 1000;   // samples per window
        std::size_t t_shift = 100;  // window shift, samples
        std::size_t z = 4;
        SelectionMethod selection_method = SelectionMethod::PCA;
    } features;

    struct Detector {
        std::vector<double> gamma_grid = {0.01, 0.001, 0.0001};
        std::vector<double> nu_grid = {0.1, 0.2, 0.3, 0.4};
        std::uint32_t t_ts = 41;
        std::uint32_t t_pc = 31;
    } detector;

    struct Paths {
        std::string corpus_dir = "artifacts/corpus";
        std::string model_file = "artifacts/model.json";
        std::string report_file = "artifacts/report.json";
    } paths;

    struct Matrix {
        std::vector<SchemeId> schemes = {SchemeId::LATTICE, SchemeId::HASHTREE, SchemeId::UOV};
        std::vector<SubversionVariant> variants = {
            SubversionVariant::TRUSTED, SubversionVariant::PRNG, SubversionVariant::HASH,
            SubversionVariant::SPARAM};
        std::vector<std::uint32_t> t_ts_grid = {21, 31, 41};
        std::vector<std::uint32_t> t_pc_grid = {11, 21, 31};
    } matrix;

    std::string to_json() const;
    static PipelineConfig from_json(const std::string& text);

    /// Digest over the offline-relevant fields.
    std::string digest() const;
};

/// Scheme-tuned defaults: sampling intervals sized so one sign() call spans
/// at least ~50 samples.
PipelineConfig default_config(SchemeId scheme);

void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace csign
