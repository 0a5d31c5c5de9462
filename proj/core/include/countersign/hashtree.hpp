#pragma once

#include <cstdint>
#include <vector>

#include "countersign/params.hpp"
#include "countersign/probes.hpp"

namespace csign::hashtree {

using Digest = std::vector<std::uint8_t>;

struct KeyPair {
    std::vector<std::uint8_t> seed;  // secret
    Digest public_key;               // hash(top_root || fors_pub)
};

struct Signature {
    std::vector<std::uint8_t> randomizer;  // per-call salt, carried in the signature
    struct TreePart {
        std::uint32_t leaf_index = 0;
        Digest leaf_secret;        // revealed preimage; leaf = H(secret)
        std::vector<Digest> path;  // sibling digests, leaf level upward
    };
    std::vector<TreePart> fors_parts;  // k entries
    TreePart top_part;                 // path of length h
};

struct SignStats {
    std::uint32_t path_nodes = 0;  // total auth path nodes emitted
    std::uint32_t index_collisions = 0;
    std::uint32_t hash_calls = 0;
};

KeyPair keygen(std::span<const std::uint8_t> key_seed, const HashTreeParams& params,
               const PrimitiveSuite& suite, ProbeContext& probes);

/// Signs by rebuilding each selected subtree (treehash): k FORS trees of t
/// leaves plus the 2^h-leaf top tree, one PRF draw per leaf secret and one
/// hash per node, then emits the authentication paths.
Signature sign(const KeyPair& keys, std::span<const std::uint8_t> msg,
               const HashTreeParams& params, const PrimitiveSuite& suite,
               ProbeContext& probes, std::uint64_t call_idx = 0,
               SignStats* stats = nullptr);

/// Recomputes every root from the carried paths and compares against the
/// public key. Structure (k, t, h) is read off the signature itself.
bool verify(const KeyPair& keys, std::span<const std::uint8_t> msg, const Signature& sig,
            const PrimitiveSuite& suite);

}  // namespace csign::hashtree
