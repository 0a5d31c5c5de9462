#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "countersign/hashtree.hpp"
#include "countersign/lattice.hpp"
#include "countersign/params.hpp"
#include "countersign/probes.hpp"
#include "countersign/uov.hpp"

namespace csign {

struct RunOutcome {
    bool ok = true;
    std::string error;
};

/// Instrumented signature target. A fuzzer test input is split as
/// [32-byte key seed || remainder = message]; short inputs are zero padded.
/// Key generation runs unmonitored (and is cached per seed); sign() emits
/// the probes the detection pipeline observes.
class Target {
public:
    explicit Target(TargetConfig config);

    SchemeId scheme() const { return config_.params.scheme; }
    const TargetConfig& config() const { return config_; }

    /// One monitored sign() execution.
    RunOutcome run_sign(std::span<const std::uint8_t> input, ProbeContext& probes,
                        std::uint64_t call_idx = 0);

    /// keygen + sign + honest verify, unmonitored. ok iff the honest
    /// verifier (original bound parameters) accepts.
    RunOutcome run_roundtrip(std::span<const std::uint8_t> input);

private:
    struct ParsedInput {
        std::array<std::uint8_t, 32> key_seed;
        std::vector<std::uint8_t> message;
    };
    ParsedInput parse_input(std::span<const std::uint8_t> input, ProbeContext& probes);

    const lattice::KeyPair& lattice_keys(const std::array<std::uint8_t, 32>& seed);
    const hashtree::KeyPair& hashtree_keys(const std::array<std::uint8_t, 32>& seed);
    const uov::KeyPair& uov_keys(const std::array<std::uint8_t, 32>& seed);

    TargetConfig config_;
    // Keypair caches: keyed by seed, bounded, deterministic FIFO eviction.
    std::map<std::array<std::uint8_t, 32>, lattice::KeyPair> lattice_cache_;
    std::map<std::array<std::uint8_t, 32>, hashtree::KeyPair> hashtree_cache_;
    std::map<std::array<std::uint8_t, 32>, uov::KeyPair> uov_cache_;
    std::vector<std::array<std::uint8_t, 32>> cache_order_;
    static constexpr std::size_t kCacheCap = 128;
};

std::unique_ptr<Target> make_target(SchemeId scheme, SubversionVariant variant);
std::unique_ptr<Target> make_target(const TargetConfig& config);

}  // namespace csign
