#include "countersign/fuzzer.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "countersign/mutate.hpp"
#include "countersign/rng.hpp"

namespace csign {
namespace {

struct ExecResult {
    bool ok = true;
    std::string digest;
};

ExecResult execute_one(Target& target, std::span<const std::uint8_t> input,
                       const VpmuConfig& vpmu_config, ExecTrace& trace) {
    trace.reset();
    Vpmu vpmu(vpmu_config);
    ProbeContext probes(&vpmu, &trace);
    const RunOutcome outcome = target.run_sign(input, probes);
    ExecResult result;
    result.ok = outcome.ok;
    result.digest = trace.digest();
    return result;
}

}  // namespace

SeedCorpus fuzz(Target& target, std::span<const std::vector<std::uint8_t>> initial_inputs,
                std::uint64_t budget_execs, std::uint64_t rng_seed,
                const VpmuConfig& vpmu_config) {
    if (initial_inputs.empty()) {
        throw std::invalid_argument("fuzz: need at least one initial input");
    }
    if (budget_execs < initial_inputs.size()) {
        throw std::invalid_argument("fuzz: budget smaller than the initial input set");
    }

    SeedCorpus corpus;
    corpus.rng_seed = rng_seed;
    Rng rng(rng_seed);
    CoverageMap map;
    ExecTrace trace;

    std::size_t edges_before = 0;
    auto admit = [&](std::span<const std::uint8_t> input, const ExecResult& exec) {
        const std::size_t gained = map.edge_count() - edges_before;
        edges_before = map.edge_count();
        CorpusEntry entry;
        entry.input.assign(input.begin(), input.end());
        entry.exec_trace_digest = exec.digest;
        entry.new_edges_found = static_cast<std::uint32_t>(gained);
        entry.energy = entry.new_edges_found + 1;
        entry.admitted_at_exec = corpus.executions;
        corpus.entries.push_back(std::move(entry));
    };

    // Dry run: initial inputs count against the budget and are always kept.
    for (const auto& input : initial_inputs) {
        const ExecResult exec = execute_one(target, input, vpmu_config, trace);
        ++corpus.executions;
        map.update(trace);
        if (!exec.ok) corpus.crash_inputs.push_back(input);
        admit(input, exec);
        if (corpus.executions == budget_execs) break;
    }

    // Energy-scheduled mutation loop.
    std::size_t cursor = 0;
    while (corpus.executions < budget_execs) {
        const CorpusEntry& parent = corpus.entries[cursor % corpus.entries.size()];
        const std::uint32_t energy = parent.energy;
        const std::vector<std::uint8_t> parent_input = parent.input;
        ++cursor;
        for (std::uint32_t round = 0; round < energy && corpus.executions < budget_execs;
             ++round) {
            std::vector<std::vector<std::uint8_t>> pool;
            if (corpus.entries.size() > 1) {
                // Pass a second corpus input for the splice operator.
                const std::size_t other = rng.bounded(corpus.entries.size());
                pool.push_back(corpus.entries[other].input);
            }
            const auto candidate = mutate(parent_input, rng, pool);
            const ExecResult exec = execute_one(target, candidate, vpmu_config, trace);
            ++corpus.executions;
            if (!exec.ok) {
                // Abort counts as an execution but is never admitted.
                map.update(trace);
                edges_before = map.edge_count();
                corpus.crash_inputs.push_back(candidate);
                continue;
            }
            if (map.update(trace)) {
                admit(candidate, exec);
            }
        }
    }

    corpus.edges = map.edge_count();
    corpus.blocks = map.block_count();
    return corpus;
}

std::vector<std::vector<std::uint8_t>> random_corpus(const SeedCorpus& reference,
                                                     std::uint64_t rng_seed) {
    Rng rng(rng_seed ^ 0x72616e646f6dULL);
    std::vector<std::vector<std::uint8_t>> out;
    out.reserve(reference.entries.size());
    for (std::size_t i = 0; i < reference.entries.size(); ++i) {
        // Length drawn from the reference corpus's empirical distribution.
        const std::size_t len =
            reference.entries[rng.bounded(reference.entries.size())].input.size();
        std::vector<std::uint8_t> input(std::max<std::size_t>(len, 1));
        for (auto& b : input) b = rng.byte();
        out.push_back(std::move(input));
    }
    return out;
}

std::string CoverageReport::to_csv() const {
    std::string out = "corpus,basic_blocks,edges,improvement_percent\n";
    char buf[64];
    for (const auto& row : rows) {
        out += row.label;
        out += ',';
        out += std::to_string(row.blocks);
        out += ',';
        out += std::to_string(row.edges);
        out += ',';
        std::snprintf(buf, sizeof buf, "%.2f", row.improvement_percent);
        out += buf;
        out += '\n';
    }
    return out;
}

CoverageReport coverage_report(
    const std::vector<std::pair<std::string, std::vector<std::vector<std::uint8_t>>>>& corpora,
    Target& target, const VpmuConfig& vpmu_config) {
    CoverageReport report;
    ExecTrace trace;
    for (const auto& [label, inputs] : corpora) {
        if (inputs.empty()) {
            throw std::invalid_argument("coverage_report: corpus '" + label + "' is empty");
        }
        CoverageMap map;
        for (const auto& input : inputs) {
            execute_one(target, input, vpmu_config, trace);
            map.update(trace);
        }
        CoverageReport::Row row;
        row.label = label;
        row.blocks = map.block_count();
        row.edges = map.edge_count();
        report.rows.push_back(row);
    }
    if (!report.rows.empty()) {
        const double base = static_cast<double>(report.rows.front().edges);
        for (auto& row : report.rows) {
            row.improvement_percent =
                base > 0 ? 100.0 * (static_cast<double>(row.edges) - base) / base : 0.0;
        }
    }
    return report;
}

}  // namespace csign
