#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "countersign/coverage.hpp"
#include "countersign/target.hpp"
#include "countersign/vpmu.hpp"

namespace csign {

struct CorpusEntry {
    std::vector<std::uint8_t> input;
    std::string exec_trace_digest;
    std::uint32_t new_edges_found = 0;
    std::uint32_t energy = 1;
    std::uint64_t admitted_at_exec = 0;
};

/// Fuzzing result: admitted inputs (initial inputs always retained), the
/// final coverage state, and any abort-triggering inputs.
struct SeedCorpus {
    std::vector<CorpusEntry> entries;
    std::uint64_t rng_seed = 0;
    std::uint64_t executions = 0;
    std::size_t edges = 0;
    std::size_t blocks = 0;
    std::vector<std::vector<std::uint8_t>> crash_inputs;

    std::vector<std::vector<std::uint8_t>> inputs() const {
        std::vector<std::vector<std::uint8_t>> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.input);
        return out;
    }
};

/// Coverage-guided greybox loop: pick an entry by energy (new_edges_found+1,
/// round robin), mutate, execute on a fresh VPMU, admit on a new hit-count
/// bucket. Runs exactly budget_execs executions (dry runs included) and is
/// fully determined by (target, initial_inputs, budget, rng_seed).
SeedCorpus fuzz(Target& target, std::span<const std::vector<std::uint8_t>> initial_inputs,
                std::uint64_t budget_execs, std::uint64_t rng_seed,
                const VpmuConfig& vpmu_config);

/// Size-matched random baseline: uniform bytes, lengths drawn from the
/// reference corpus's length distribution.
std::vector<std::vector<std::uint8_t>> random_corpus(const SeedCorpus& reference,
                                                     std::uint64_t rng_seed);

struct CoverageReport {
    struct Row {
        std::string label;
        std::size_t blocks = 0;
        std::size_t edges = 0;
        double improvement_percent = 0.0;  // vs the first (baseline) row
    };
    std::vector<Row> rows;

    std::string to_csv() const;
};

/// Executes every input of every labeled corpus and unions coverage per
/// corpus. Improvement percentages are relative to the first corpus.
CoverageReport coverage_report(
    const std::vector<std::pair<std::string, std::vector<std::vector<std::uint8_t>>>>& corpora,
    Target& target, const VpmuConfig& vpmu_config);

}  // namespace csign
