#include "countersign/target.hpp"

#include <algorithm>

namespace csign {
namespace {

constexpr std::uint32_t kBlockParseShort = 400;
constexpr std::uint32_t kBlockLenClass = 401;  // ..406
constexpr std::uint32_t kSiteParse = 400;

std::uint32_t length_class(std::size_t msg_len) {
    if (msg_len == 0) return 0;
    if (msg_len <= 16) return 1;
    if (msg_len <= 64) return 2;
    if (msg_len <= 256) return 3;
    if (msg_len <= 1024) return 4;
    return 5;
}

}  // namespace

Target::Target(TargetConfig config) : config_(std::move(config)) {
    config_.params.validate();
}

Target::ParsedInput Target::parse_input(std::span<const std::uint8_t> input,
                                        ProbeContext& probes) {
    ParsedInput parsed;
    parsed.key_seed.fill(0);
    const bool short_input = input.size() < 32;
    probes.branch(kSiteParse, short_input);
    if (short_input) probes.block(kBlockParseShort);
    const std::size_t n = std::min<std::size_t>(32, input.size());
    std::copy_n(input.begin(), n, parsed.key_seed.begin());
    if (input.size() > 32) {
        parsed.message.assign(input.begin() + 32, input.end());
    }
    probes.block(kBlockLenClass + length_class(parsed.message.size()));
    return parsed;
}

const lattice::KeyPair& Target::lattice_keys(const std::array<std::uint8_t, 32>& seed) {
    auto it = lattice_cache_.find(seed);
    if (it != lattice_cache_.end()) return it->second;
    if (cache_order_.size() >= kCacheCap) {
        lattice_cache_.erase(cache_order_.front());
        cache_order_.erase(cache_order_.begin());
    }
    ProbeContext muted = ProbeContext::muted();
    auto keys = lattice::keygen(seed, config_.params.lattice, config_.primitives, muted);
    cache_order_.push_back(seed);
    return lattice_cache_.emplace(seed, std::move(keys)).first->second;
}

const hashtree::KeyPair& Target::hashtree_keys(const std::array<std::uint8_t, 32>& seed) {
    auto it = hashtree_cache_.find(seed);
    if (it != hashtree_cache_.end()) return it->second;
    if (cache_order_.size() >= kCacheCap) {
        hashtree_cache_.erase(cache_order_.front());
        cache_order_.erase(cache_order_.begin());
    }
    ProbeContext muted = ProbeContext::muted();
    auto keys = hashtree::keygen(seed, config_.params.hashtree, config_.primitives, muted);
    cache_order_.push_back(seed);
    return hashtree_cache_.emplace(seed, std::move(keys)).first->second;
}

const uov::KeyPair& Target::uov_keys(const std::array<std::uint8_t, 32>& seed) {
    auto it = uov_cache_.find(seed);
    if (it != uov_cache_.end()) return it->second;
    if (cache_order_.size() >= kCacheCap) {
        uov_cache_.erase(cache_order_.front());
        cache_order_.erase(cache_order_.begin());
    }
    ProbeContext muted = ProbeContext::muted();
    auto keys = uov::keygen(seed, config_.params.uov, config_.primitives, muted);
    cache_order_.push_back(seed);
    return uov_cache_.emplace(seed, std::move(keys)).first->second;
}

RunOutcome Target::run_sign(std::span<const std::uint8_t> input, ProbeContext& probes,
                            std::uint64_t call_idx) {
    const ParsedInput parsed = parse_input(input, probes);
    switch (config_.params.scheme) {
        case SchemeId::LATTICE: {
            const auto& keys = lattice_keys(parsed.key_seed);
            const auto sig = lattice::sign(keys, parsed.message, config_.params.lattice,
                                           config_.primitives, probes, call_idx);
            if (!sig) return {false, "lattice: rejection loop iteration cap exceeded"};
            return {};
        }
        case SchemeId::HASHTREE: {
            const auto& keys = hashtree_keys(parsed.key_seed);
            hashtree::sign(keys, parsed.message, config_.params.hashtree, config_.primitives,
                           probes, call_idx);
            return {};
        }
        case SchemeId::UOV: {
            const auto& keys = uov_keys(parsed.key_seed);
            const auto sig = uov::sign(keys, parsed.message, config_.params.uov,
                                       config_.primitives, probes, call_idx);
            if (!sig) return {false, "uov: retry cap exceeded"};
            return {};
        }
    }
    return {false, "unknown scheme"};
}

RunOutcome Target::run_roundtrip(std::span<const std::uint8_t> input) {
    ProbeContext muted = ProbeContext::muted();
    const ParsedInput parsed = parse_input(input, muted);
    switch (config_.params.scheme) {
        case SchemeId::LATTICE: {
            const auto& keys = lattice_keys(parsed.key_seed);
            const auto sig = lattice::sign(keys, parsed.message, config_.params.lattice,
                                           config_.primitives, muted);
            if (!sig) return {false, "sign aborted"};
            // Honest verifier: original (unsubverted) parameter set.
            const LatticeParams original;
            if (!lattice::verify(keys, parsed.message, *sig, original, config_.primitives)) {
                return {false, "verify rejected"};
            }
            return {};
        }
        case SchemeId::HASHTREE: {
            const auto& keys = hashtree_keys(parsed.key_seed);
            const auto sig = hashtree::sign(keys, parsed.message, config_.params.hashtree,
                                            config_.primitives, muted);
            if (!hashtree::verify(keys, parsed.message, sig, config_.primitives)) {
                return {false, "verify rejected"};
            }
            return {};
        }
        case SchemeId::UOV: {
            const auto& keys = uov_keys(parsed.key_seed);
            const auto sig = uov::sign(keys, parsed.message, config_.params.uov,
                                       config_.primitives, muted);
            if (!sig) return {false, "sign aborted"};
            if (!uov::verify(keys, parsed.message, *sig, config_.primitives)) {
                return {false, "verify rejected"};
            }
            return {};
        }
    }
    return {false, "unknown scheme"};
}

std::unique_ptr<Target> make_target(SchemeId scheme, SubversionVariant variant) {
    return std::make_unique<Target>(apply_subversion(scheme, variant));
}

std::unique_ptr<Target> make_target(const TargetConfig& config) {
    return std::make_unique<Target>(config);
}

}  // namespace csign
