// countersign: behavioral fingerprinting of signature implementations.
//
// Offline: fuzz a trusted build for high-coverage seed inputs, collect
// virtual-counter signatures, train the detectors. Online: replay against a
// suspect build and report trusted/subverted.
//
// Exit codes: 0 trusted/success, 2 subverted verdict, 1 error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include <countersign/pipeline.hpp>

using namespace csign;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string scheme = "lattice";
    std::string variant = "trusted";
};

PipelineConfig resolve_config(const CommonOptions& options) {
    PipelineConfig config;
    if (!options.config_path.empty()) {
        config = PipelineConfig::from_json(read_file(options.config_path));
    } else {
        config = default_config(scheme_from_string(options.scheme));
    }
    return config;
}

void add_common(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("--config", options.config_path, "pipeline config JSON");
    cmd->add_option("--scheme", options.scheme, "lattice|hashtree|uov");
    cmd->add_option("--variant", options.variant, "trusted|prng|hash|sparam");
}

int cmd_fuzz(const CommonOptions& options, std::uint64_t budget, std::uint64_t seed,
             const std::string& out_dir) {
    PipelineConfig config = resolve_config(options);
    if (options.config_path.empty()) config.scheme = scheme_from_string(options.scheme);
    if (budget > 0) config.fuzz.budget_execs = budget;
    if (seed > 0) config.fuzz.rng_seed = seed;
    if (!out_dir.empty()) config.paths.corpus_dir = out_dir;

    auto target = make_target(config.scheme, variant_from_string(options.variant));
    const SeedCorpus corpus = fuzz(*target, config.fuzz.initial_inputs,
                                   config.fuzz.budget_execs, config.fuzz.rng_seed, config.vpmu);
    persist_corpus(corpus, config.paths.corpus_dir);
    std::printf("fuzz: %llu executions, %zu corpus entries, %zu edges, %zu blocks, %zu aborts\n",
                static_cast<unsigned long long>(corpus.executions), corpus.entries.size(),
                corpus.edges, corpus.blocks, corpus.crash_inputs.size());
    std::printf("corpus written to %s\n", config.paths.corpus_dir.c_str());
    return 0;
}

int cmd_collect(const CommonOptions& options) {
    PipelineConfig config = resolve_config(options);
    if (options.config_path.empty()) config.scheme = scheme_from_string(options.scheme);
    auto target = make_target(config.scheme, variant_from_string(options.variant));

    const auto inputs = load_corpus_inputs(config.paths.corpus_dir);
    if (inputs.empty()) {
        std::fprintf(stderr, "collect: no corpus at %s (run fuzz first)\n",
                     config.paths.corpus_dir.c_str());
        return 1;
    }
    const auto ts = sample_time_series(*target, inputs[0], config.sampling.t_m,
                                       config.sampling.t_s, config.vpmu);
    if (ts.aborted) {
        std::fprintf(stderr, "collect: target aborted during sampling: %s\n", ts.error.c_str());
        return 1;
    }
    const auto pc = collect_checkpoints(*target, inputs, config.vpmu);
    if (pc.rows.empty()) {
        std::fprintf(stderr, "warning: target emitted no checkpoints\n");
    }
    for (const auto& skipped : pc.skipped) {
        std::fprintf(stderr, "warning: seed %u skipped: %s\n", skipped.seed_id,
                     skipped.error.c_str());
    }
    write_file_atomic(config.paths.corpus_dir + "/ts_signature.csv", to_csv(ts.signature));
    write_file_atomic(config.paths.corpus_dir + "/pc_signature.csv", to_csv(pc));
    std::printf("collect: %zu time-series rows, %zu checkpoint rows (%zu seeds skipped)\n",
                ts.signature.rows.size(), pc.rows.size(), pc.skipped.size());
    return 0;
}

int cmd_select(const CommonOptions& options) {
    PipelineConfig config = resolve_config(options);
    std::ifstream in(config.paths.corpus_dir + "/ts_signature.csv");
    if (!in) {
        std::fprintf(stderr, "select: missing %s/ts_signature.csv (run collect first)\n",
                     config.paths.corpus_dir.c_str());
        return 1;
    }
    const auto sig = time_series_from_csv(in, config.sampling.t_s, config.sampling.t_m);
    std::vector<std::array<double, kEventCount>> rows;
    rows.reserve(sig.rows.size());
    for (const auto& row : sig.rows) {
        std::array<double, kEventCount> converted{};
        for (std::size_t e = 0; e < kEventCount; ++e) converted[e] = static_cast<double>(row[e]);
        rows.push_back(converted);
    }
    const auto selection =
        select_counters(rows, config.features.selection_method, config.features.z);
    std::printf("method: %s\n", to_string(selection.method).c_str());
    for (std::size_t e = 0; e < kEventCount; ++e) {
        std::printf("  %-8s score %.6g\n", std::string(kEventNames[e]).c_str(),
                    selection.scores[e]);
    }
    std::printf("chosen:");
    for (EventKind kind : selection.chosen) {
        std::printf(" %s", std::string(kEventNames[event_index(kind)]).c_str());
    }
    std::printf("\n");
    return 0;
}

int cmd_train(const CommonOptions& options) {
    PipelineConfig config = resolve_config(options);
    if (options.config_path.empty()) config.scheme = scheme_from_string(options.scheme);
    const OfflineResult result = run_offline(config);
    std::printf("offline phase complete\n");
    std::printf("  corpus: %zu entries, %zu edges\n", result.corpus.entries.size(),
                result.corpus.edges);
    std::printf("  counters:");
    for (EventKind kind : result.model.selection.chosen) {
        std::printf(" %s", std::string(kEventNames[event_index(kind)]).c_str());
    }
    std::printf("\n  ts model: gamma %g nu %g holdout accuracy %.4f\n",
                result.model.ts_model.gamma, result.model.ts_model.nu,
                result.model.ts_holdout_accuracy);
    std::printf("  pc ensemble: gamma %g nu %g cv accuracy %.4f, Y_s fold %u (%zu seeds)\n",
                result.model.pc_ensemble.members[0].gamma,
                result.model.pc_ensemble.members[0].nu, result.model.cv.mean_accuracy,
                result.model.cv.chosen_fold, result.model.cv.chosen_seeds.size());
    std::printf("  model: %s\n", config.paths.model_file.c_str());
    std::printf("timing breakdown\n%s", result.timing.to_csv().c_str());
    return 0;
}

int cmd_detect(const CommonOptions& options, const std::string& model_path) {
    PipelineConfig config = resolve_config(options);
    const std::string path = model_path.empty() ? config.paths.model_file : model_path;
    const ModelDocument model = ModelDocument::from_json(read_file(path));

    const SubversionVariant variant = variant_from_string(options.variant);
    auto suspect = make_target(scheme_from_string(model.scheme), variant);
    const std::optional<int> truth = variant == SubversionVariant::TRUSTED ? +1 : -1;
    const DetectReport report = run_detect(config, model, *suspect, truth, to_string(variant));
    write_file_atomic(config.paths.report_file, report.to_json());

    if (report.aborted) {
        std::printf("verdict: subverted (behavioral abort: %s)\n", report.abort_error.c_str());
        return 2;
    }
    std::printf("ts  path: pos %.4f neg %.4f -> %s\n", report.ts_verdict.pos_fraction,
                report.ts_verdict.neg_fraction,
                report.ts_verdict.subverted ? "subverted" : "trusted");
    std::printf("pc  path: pos %.4f neg %.4f -> %s\n", report.pc_verdict.pos_fraction,
                report.pc_verdict.neg_fraction,
                report.pc_verdict.subverted ? "subverted" : "trusted");
    std::printf("verdict: %s\n", report.subverted ? "SUBVERTED" : "TRUSTED");
    std::printf("report written to %s\n", config.paths.report_file.c_str());
    return report.subverted ? 2 : 0;
}

int cmd_matrix(const CommonOptions& options) {
    const PipelineConfig config = resolve_config(options);
    const MatrixReport report = run_experiment_matrix(config);
    const std::string base = config.paths.report_file + ".d";
    write_file_atomic(base + "/detection.csv", report.detection_csv);
    write_file_atomic(base + "/coverage.csv", report.coverage_csv);
    write_file_atomic(base + "/auc.csv", report.auc_csv);
    std::printf("%s", report.detection_csv.c_str());
    std::printf("%s", report.coverage_csv.c_str());
    std::printf("%s", report.auc_csv.c_str());
    for (const auto& error : report.cell_errors) {
        std::fprintf(stderr, "cell error: %s\n", error.c_str());
    }
    std::printf("reports written under %s\n", base.c_str());
    return report.cell_errors.empty() ? 0 : 1;
}

int cmd_report(const CommonOptions& options) {
    PipelineConfig config = resolve_config(options);
    const ModelDocument model = ModelDocument::from_json(read_file(config.paths.model_file));
    const std::string csv = kde_scatter_csv(config, model);
    const std::string out = config.paths.report_file + ".kde.csv";
    write_file_atomic(out, csv);
    std::printf("KDE scatter dump (%zu bytes) written to %s\n", csv.size(), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"countersign: virtual-counter fingerprinting of signature implementations"};
    app.require_subcommand(1);

    CommonOptions options;
    std::uint64_t budget = 0, seed = 0;
    std::string out_dir, model_path;

    auto* fuzz_cmd = app.add_subcommand("fuzz", "coverage-guided seed generation");
    add_common(fuzz_cmd, options);
    fuzz_cmd->add_option("--budget", budget, "execution budget");
    fuzz_cmd->add_option("--seed", seed, "fuzzer RNG seed");
    fuzz_cmd->add_option("--out", out_dir, "corpus output directory");

    auto* collect_cmd = app.add_subcommand("collect", "collect both HPC signatures");
    add_common(collect_cmd, options);

    auto* select_cmd = app.add_subcommand("select", "rank counters on the trusted signature");
    add_common(select_cmd, options);

    auto* train_cmd = app.add_subcommand("train", "full offline phase (fuzz/collect/train)");
    add_common(train_cmd, options);

    auto* detect_cmd = app.add_subcommand("detect", "run both detection paths on a suspect");
    add_common(detect_cmd, options);
    detect_cmd->add_option("--model", model_path, "model document (default: config path)");

    auto* matrix_cmd = app.add_subcommand("matrix", "scheme x variant x threshold sweep");
    add_common(matrix_cmd, options);

    auto* report_cmd = app.add_subcommand("report", "emit plot-ready artifacts");
    add_common(report_cmd, options);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fuzz_cmd->parsed()) return cmd_fuzz(options, budget, seed, out_dir);
        if (collect_cmd->parsed()) return cmd_collect(options);
        if (select_cmd->parsed()) return cmd_select(options);
        if (train_cmd->parsed()) return cmd_train(options);
        if (detect_cmd->parsed()) return cmd_detect(options, model_path);
        if (matrix_cmd->parsed()) return cmd_matrix(options);
        if (report_cmd->parsed()) return cmd_report(options);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
