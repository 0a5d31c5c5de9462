#include "countersign/hashtree.hpp"

#include <algorithm>

namespace csign::hashtree {
namespace {

// Probe ids 200..299 belong to the hashtree target.
constexpr std::uint32_t kBlockDigest = 200;
constexpr std::uint32_t kBlockLeafPrf = 201;
constexpr std::uint32_t kBlockTreehashLevel = 202;
constexpr std::uint32_t kBlockPathLeft = 203;
constexpr std::uint32_t kBlockPathRight = 204;
constexpr std::uint32_t kBlockTopLevel = 205;
constexpr std::uint32_t kBlockPack = 206;
constexpr std::uint32_t kBlockCollisionBucket = 210;  // ..213
constexpr std::uint32_t kBlockCornerBucket = 215;     // ..217
constexpr std::uint32_t kBlockRunBucket = 220;        // ..223

constexpr std::uint32_t kSiteLeafLoop = 201;
constexpr std::uint32_t kSitePathDir = 202;
constexpr std::uint32_t kSiteTopDir = 203;
constexpr std::uint32_t kSitePackLoop = 204;
constexpr std::uint32_t kSiteLevelLoop = 205;

constexpr std::uint32_t kCpEntry = 20;
constexpr std::uint32_t kCpForsBase = 21;      // ..24: one id per FORS tree
constexpr std::uint32_t kCpForsDone = 25;
constexpr std::uint32_t kCpTopLeafChunk = 26;  // multi-hit: every 32 leaves
constexpr std::uint32_t kCpTopDone = 27;
constexpr std::uint32_t kCpPack = 28;
constexpr std::uint32_t kCpDone = 29;

constexpr std::uint32_t kLeafChunk = 32;

constexpr std::uint64_t kAddrNodes = 0x2100'0000;
constexpr std::uint64_t kAddrSecrets = 0x2140'0000;
constexpr std::uint64_t kAddrSig = 0x2180'0000;

Digest hash_pair(const Digest& left, const Digest& right, std::uint32_t n_bytes,
                 const PrimitiveSuite& suite, ProbeContext& probes) {
    std::vector<std::uint8_t> input;
    input.reserve(left.size() + right.size());
    input.insert(input.end(), left.begin(), left.end());
    input.insert(input.end(), right.begin(), right.end());
    return suite.hash(input, n_bytes, probes);
}

/// Per-leaf secret: a PRF draw from the key seed (the stream the PRNG
/// subversion degrades).
Digest leaf_secret(std::span<const std::uint8_t> seed, std::uint8_t domain,
                   std::uint32_t tree_idx, std::uint32_t leaf_idx, std::uint32_t n_bytes,
                   const PrimitiveSuite& suite, ProbeContext& probes) {
    std::vector<std::uint8_t> prf_seed(seed.begin(), seed.end());
    prf_seed.push_back(domain);
    prf_seed.push_back(static_cast<std::uint8_t>(tree_idx));
    prf_seed.push_back(static_cast<std::uint8_t>(leaf_idx));
    prf_seed.push_back(static_cast<std::uint8_t>(leaf_idx >> 8));
    probes.block(kBlockLeafPrf);
    probes.memory(kAddrSecrets + (static_cast<std::uint64_t>(tree_idx) * 65536 + leaf_idx) * 32,
                  32);
    auto prng = suite.make_prng(prf_seed);
    Digest secret(n_bytes);
    prng->fill(secret, probes);
    return secret;
}

struct Treehash {
    Digest root;
    Signature::TreePart part;  // auth path for the requested leaf
};

/// Rebuilds one subtree from leaf secrets, collecting the authentication
/// path of target_leaf on the way up. One PRF per leaf, one hash per leaf
/// and per internal node. chunk_checkpoint, when nonzero, fires after every
/// 32 processed leaves (and once at the end of a shorter leaf loop).
Treehash treehash(std::span<const std::uint8_t> seed, std::uint8_t domain,
                  std::uint32_t tree_idx, std::uint32_t leaves, std::uint32_t target_leaf,
                  std::uint32_t n_bytes, const PrimitiveSuite& suite, ProbeContext& probes,
                  std::uint32_t dir_site, SignStats* stats, std::uint32_t* run_length,
                  std::uint32_t chunk_checkpoint = 0) {
    std::vector<Digest> level(leaves);
    Treehash out;
    out.part.leaf_index = target_leaf;
    for (std::uint32_t i = 0; i < leaves; ++i) {
        const Digest secret =
            leaf_secret(seed, domain, tree_idx, i, n_bytes, suite, probes);
        if (i == target_leaf) out.part.leaf_secret = secret;
        level[i] = suite.hash(secret, n_bytes, probes);
        if (stats) ++stats->hash_calls;
        probes.branch(kSiteLeafLoop, i + 1 < leaves);
        if (chunk_checkpoint != 0 && (i + 1) % kLeafChunk == 0) {
            probes.checkpoint(chunk_checkpoint);
        }
    }
    if (chunk_checkpoint != 0 && leaves % kLeafChunk != 0) {
        probes.checkpoint(chunk_checkpoint);
    }

    std::uint32_t node_idx = target_leaf;
    std::uint32_t longest_run = 0, current_run = 0;
    int last_dir = -1;
    std::uint64_t level_base = kAddrNodes + static_cast<std::uint64_t>(tree_idx) * (1u << 22);
    while (level.size() > 1) {
        probes.block(kBlockTreehashLevel);
        const bool is_right = (node_idx & 1) != 0;
        probes.branch(dir_site, is_right);
        probes.block(is_right ? kBlockPathRight : kBlockPathLeft);
        const std::uint32_t sibling = is_right ? node_idx - 1 : node_idx + 1;
        probes.memory(level_base + static_cast<std::uint64_t>(sibling) * n_bytes, n_bytes);
        out.part.path.push_back(level[sibling]);
        const int dir = is_right ? 1 : 0;
        if (dir == last_dir) {
            ++current_run;
        } else {
            current_run = 1;
            last_dir = dir;
        }
        longest_run = std::max(longest_run, current_run);

        std::vector<Digest> next(level.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = hash_pair(level[2 * i], level[2 * i + 1], n_bytes, suite, probes);
            if (stats) ++stats->hash_calls;
        }
        probes.branch(kSiteLevelLoop, next.size() > 1);
        level = std::move(next);
        node_idx /= 2;
        level_base += (1u << 20);
    }
    out.root = level[0];
    if (run_length) *run_length = longest_run;
    return out;
}

Digest root_from_part(const Signature::TreePart& part, std::uint32_t n_bytes,
                      const PrimitiveSuite& suite, ProbeContext& probes) {
    Digest node = suite.hash(part.leaf_secret, n_bytes, probes);
    std::uint32_t index = part.leaf_index;
    for (const Digest& sibling : part.path) {
        node = (index & 1) ? hash_pair(sibling, node, n_bytes, suite, probes)
                           : hash_pair(node, sibling, n_bytes, suite, probes);
        index /= 2;
    }
    return node;
}

struct IndexDraw {
    std::vector<std::uint32_t> fors;
    std::uint32_t top = 0;
};

IndexDraw draw_indices(const Digest& digest, const HashTreeParams& params,
                       const PrimitiveSuite& suite, ProbeContext& probes) {
    auto prng = suite.make_prng(digest);
    IndexDraw draw;
    draw.fors.resize(params.k);
    for (std::uint32_t i = 0; i < params.k; ++i) {
        draw.fors[i] = prng->bounded(params.t, probes);
    }
    draw.top = prng->bounded(1u << params.h, probes);
    return draw;
}

Digest public_key_from_roots(const std::vector<Digest>& fors_roots, const Digest& top_root,
                             std::uint32_t n_bytes, const PrimitiveSuite& suite,
                             ProbeContext& probes) {
    std::vector<std::uint8_t> roots;
    for (const Digest& r : fors_roots) roots.insert(roots.end(), r.begin(), r.end());
    const Digest fors_pub = suite.hash(roots, n_bytes, probes);
    std::vector<std::uint8_t> pk_input(top_root);
    pk_input.insert(pk_input.end(), fors_pub.begin(), fors_pub.end());
    return suite.hash(pk_input, n_bytes, probes);
}

std::uint32_t bucket3(std::uint32_t v) { return std::min<std::uint32_t>(v, 3); }

}  // namespace

KeyPair keygen(std::span<const std::uint8_t> key_seed, const HashTreeParams& params,
               const PrimitiveSuite& suite, ProbeContext& probes) {
    KeyPair keys;
    keys.seed.assign(key_seed.begin(), key_seed.end());
    std::vector<Digest> fors_roots;
    for (std::uint32_t i = 0; i < params.k; ++i) {
        fors_roots.push_back(treehash(key_seed, 0x10, i, params.t, 0, params.n_bytes, suite,
                                      probes, kSitePathDir, nullptr, nullptr)
                                 .root);
    }
    const Digest top_root = treehash(key_seed, 0x11, 0, 1u << params.h, 0, params.n_bytes,
                                     suite, probes, kSiteTopDir, nullptr, nullptr)
                                .root;
    keys.public_key = public_key_from_roots(fors_roots, top_root, params.n_bytes, suite, probes);
    return keys;
}

Signature sign(const KeyPair& keys, std::span<const std::uint8_t> msg,
               const HashTreeParams& params, const PrimitiveSuite& suite,
               ProbeContext& probes, std::uint64_t call_idx, SignStats* stats) {
    SignStats local;
    SignStats& st = stats ? *stats : local;
    st = SignStats{};

    Signature sig;
    sig.randomizer.resize(8);
    for (int b = 0; b < 8; ++b) {
        sig.randomizer[b] = static_cast<std::uint8_t>(call_idx >> (8 * b));
    }

    probes.block(kBlockDigest);
    std::vector<std::uint8_t> digest_input(keys.public_key);
    digest_input.insert(digest_input.end(), sig.randomizer.begin(), sig.randomizer.end());
    digest_input.insert(digest_input.end(), msg.begin(), msg.end());
    const auto digest = suite.hash(digest_input, 32, probes);
    const IndexDraw indices = draw_indices(digest, params, suite, probes);
    probes.checkpoint(kCpEntry);

    std::uint32_t collisions = 0;
    for (std::uint32_t i = 0; i < params.k; ++i) {
        for (std::uint32_t j = i + 1; j < params.k; ++j) {
            if (indices.fors[i] == indices.fors[j]) ++collisions;
        }
    }
    std::uint32_t corners = 0;
    for (std::uint32_t idx : indices.fors) {
        if (idx == 0 || idx == params.t - 1) ++corners;
    }
    st.index_collisions = collisions;
    probes.block(kBlockCollisionBucket + bucket3(collisions));
    probes.block(kBlockCornerBucket + std::min<std::uint32_t>(corners, 2));

    for (std::uint32_t i = 0; i < params.k; ++i) {
        Treehash th = treehash(keys.seed, 0x10, i, params.t, indices.fors[i], params.n_bytes,
                               suite, probes, kSitePathDir, &st, nullptr);
        st.path_nodes += static_cast<std::uint32_t>(th.part.path.size());
        sig.fors_parts.push_back(std::move(th.part));
        probes.checkpoint(kCpForsBase + i);
    }
    probes.checkpoint(kCpForsDone);

    std::uint32_t top_run = 0;
    Treehash top = treehash(keys.seed, 0x11, 0, 1u << params.h, indices.top, params.n_bytes,
                            suite, probes, kSiteTopDir, &st, &top_run,
                            /*chunk_checkpoint=*/kCpTopLeafChunk);
    st.path_nodes += static_cast<std::uint32_t>(top.part.path.size());
    sig.top_part = std::move(top.part);
    for (std::uint32_t level = 0; level < params.h; ++level) probes.block(kBlockTopLevel);
    const std::uint32_t run_bucket = top_run <= 3 ? 0 : top_run <= 5 ? 1 : top_run <= 7 ? 2 : 3;
    probes.block(kBlockRunBucket + run_bucket);
    probes.checkpoint(kCpTopDone);

    // Serialize, bracketed so the second checkpoint hit is phase-local.
    probes.checkpoint(kCpPack);
    probes.block(kBlockPack);
    std::uint64_t off = 0;
    auto pack_part = [&](const Signature::TreePart& part) {
        probes.memory(kAddrSig + off, params.n_bytes);
        off += params.n_bytes;
        for (const Digest& d : part.path) {
            probes.memory(kAddrSig + off, d.size());
            off += d.size();
        }
        probes.branch(kSitePackLoop, true);
    };
    for (const auto& part : sig.fors_parts) pack_part(part);
    pack_part(sig.top_part);
    probes.branch(kSitePackLoop, false);
    probes.checkpoint(kCpPack);

    probes.checkpoint(kCpDone);
    return sig;
}

bool verify(const KeyPair& keys, std::span<const std::uint8_t> msg, const Signature& sig,
            const PrimitiveSuite& suite) {
    ProbeContext muted = ProbeContext::muted();
    if (sig.fors_parts.empty()) return false;
    const std::uint32_t n_bytes = static_cast<std::uint32_t>(keys.public_key.size());
    const std::uint32_t k = static_cast<std::uint32_t>(sig.fors_parts.size());
    const std::uint32_t t = 1u << sig.fors_parts[0].path.size();
    const std::uint32_t h = static_cast<std::uint32_t>(sig.top_part.path.size());

    std::vector<std::uint8_t> digest_input(keys.public_key);
    digest_input.insert(digest_input.end(), sig.randomizer.begin(), sig.randomizer.end());
    digest_input.insert(digest_input.end(), msg.begin(), msg.end());
    const auto digest = suite.hash(digest_input, 32, muted);

    auto index_prng = suite.make_prng(digest);
    for (std::uint32_t i = 0; i < k; ++i) {
        const std::uint32_t expected_index = index_prng->bounded(t, muted);
        if (sig.fors_parts[i].leaf_index != expected_index) return false;
        if (sig.fors_parts[i].leaf_secret.size() != n_bytes) return false;
    }
    const std::uint32_t expected_top = index_prng->bounded(1u << h, muted);
    if (sig.top_part.leaf_index != expected_top) return false;

    std::vector<Digest> fors_roots;
    for (const auto& part : sig.fors_parts) {
        fors_roots.push_back(root_from_part(part, n_bytes, suite, muted));
    }
    const Digest top_root = root_from_part(sig.top_part, n_bytes, suite, muted);
    const Digest pk = public_key_from_roots(fors_roots, top_root, n_bytes, suite, muted);
    return pk == keys.public_key;
}

}  // namespace csign::hashtree
