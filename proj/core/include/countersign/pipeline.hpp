#pragma once

#include <optional>
#include <string>

#include "countersign/aggregate.hpp"
#include "countersign/collect.hpp"
#include "countersign/config.hpp"
#include "countersign/fuzzer.hpp"
#include "countersign/model_io.hpp"
#include "countersign/target.hpp"

namespace csign {

/// Offline phase output. Artifacts are also persisted under config.paths
/// as they are produced; timing lands in a separate file because wall
/// clock is inherently non-reproducible.
struct OfflineResult {
    PipelineConfig config;  // variant forced to trusted
    SeedCorpus corpus;
    TimeSeriesSignature ts_signature;
    CheckpointSignature pc_signature;
    ModelDocument model;

    struct Timing {
        double fuzz_seconds = 0;
        double collect_seconds = 0;
        double train_seconds = 0;
        std::uint64_t ts_virtual_cycles = 0;
        std::string to_csv() const;
    } timing;
};

/// fuzz -> collect both signatures -> select counters -> build features ->
/// cross-validated training of the TS model and the PC ensemble -> persist.
OfflineResult run_offline(PipelineConfig config);

/// One detection path outcome plus the combined verdict.
struct DetectReport {
    std::string config_digest;
    std::string model_digest;
    std::string scheme;
    std::string suspect_label;
    bool aborted = false;
    std::string abort_error;
    Verdict ts_verdict;
    Verdict pc_verdict;
    bool subverted = false;  // OR of the two paths (or an abort)

    std::string to_json() const;
};

/// Online phase. The suspect target is opaque apart from its probe events.
/// Throws when the config digest does not match the model document.
DetectReport run_detect(const PipelineConfig& config, const ModelDocument& model,
                        Target& suspect, std::optional<int> truth = std::nullopt,
                        const std::string& suspect_label = "suspect");

/// Loads the persisted corpus inputs (manifest order).
std::vector<std::vector<std::uint8_t>> load_corpus_inputs(const std::string& corpus_dir);

void persist_corpus(const SeedCorpus& corpus, const std::string& corpus_dir);

/// Mann-Whitney AUC of trusted-vs-suspect row decision values.
double decision_auc(const std::vector<double>& trusted_scores,
                    const std::vector<double>& suspect_scores);

struct MatrixReport {
    std::string detection_csv;   // scheme,variant,kind,threshold,pos,neg,accuracy
    std::string coverage_csv;    // per scheme: fuzz vs size-matched random corpus
    std::string auc_csv;         // scheme,variant,auc_fuzzed,auc_random,gap
    std::vector<std::string> cell_errors;
};

/// Full experiment sweep over the config's matrix grid. Per-cell failures
/// are recorded and the sweep continues.
MatrixReport run_experiment_matrix(const PipelineConfig& base);

/// KDE-ready scatter dump: per checkpoint, the two leading selected
/// counters for trusted and suspect runs over the chosen seeds.
std::string kde_scatter_csv(const PipelineConfig& config, const ModelDocument& model);

}  // namespace csign
