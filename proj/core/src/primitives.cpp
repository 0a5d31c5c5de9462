#include "countersign/primitives.hpp"

#include <algorithm>
#include <cstring>

namespace csign {
namespace {

// Probe id ranges: primitives own blocks 2..19 and branch sites 2..19.
// Scheme code uses 100+ (lattice), 200+ (hashtree), 300+ (uov).
constexpr std::uint32_t kBlockSpongeAbsorb = 2;
constexpr std::uint32_t kBlockSpongeSqueeze = 3;
constexpr std::uint32_t kBlockSpongePrng = 4;
constexpr std::uint32_t kBlockLcg = 5;
constexpr std::uint32_t kBlockRollDigest = 6;
constexpr std::uint32_t kBlockRollExpand = 7;
constexpr std::uint32_t kBlockPrngSeed = 8;

constexpr std::uint32_t kSiteAbsorbLoop = 2;
constexpr std::uint32_t kSiteSqueezeLoop = 3;
constexpr std::uint32_t kSitePrngLoop = 4;
constexpr std::uint32_t kSiteLcgLoop = 5;
constexpr std::uint32_t kSiteRollLoop = 6;

constexpr std::uint64_t kHashStateAddr = 0x3000'0000;
constexpr std::uint64_t kHashScratchAddr = 0x3800'0000;
constexpr std::uint64_t kPrngStateAddr = 0x3400'0000;

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

// ARX mixing round shared by the sponge hash and the strong PRNG.
// Constants are odd 64-bit multipliers; rotation amounts are coprime-ish.
void mix4(std::uint64_t s[4]) {
    s[0] += s[1]; s[3] ^= s[0]; s[3] = rotl64(s[3], 23);
    s[2] += s[3]; s[1] ^= s[2]; s[1] = rotl64(s[1], 29);
    s[0] += s[3]; s[2] ^= s[1]; s[2] = rotl64(s[2], 11);
    s[1] += 0x9e3779b97f4a7c15ULL;
    s[0] = rotl64(s[0], 32);
}

void permute8(std::uint64_t s[8]) {
    for (int round = 0; round < 6; ++round) {
        mix4(s);
        mix4(s + 4);
        // Cross-lane swap so both halves diffuse.
        std::swap(s[1], s[5]);
        std::swap(s[3], s[6]);
        s[4] ^= s[0];
        s[7] += static_cast<std::uint64_t>(round) + 1;
    }
}

std::uint64_t load64(const std::uint8_t* p) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
    return v;
}

void store64(std::uint8_t* p, std::uint64_t v) { std::memcpy(p, &v, 8); }

}  // namespace

std::uint32_t Prng::bounded(std::uint32_t bound, ProbeContext& probes) {
    if (bound <= 1) return 0;
    const std::uint32_t limit = (65536u / bound) * bound;
    for (;;) {
        const std::uint32_t v = next_u16(probes);
        probes.branch(kSitePrngLoop + 10, v >= limit);
        if (v < limit) return v % bound;
    }
}

StrongPrng::StrongPrng(std::span<const std::uint8_t> seed) {
    state_[0] = 0x6373696768617368ULL;
    state_[1] = 0x70726e672d763031ULL;
    state_[2] = 0;
    state_[3] = 0;
    // Absorb seed in 16-byte blocks into the first half of the state.
    std::uint8_t block[16];
    for (std::size_t off = 0; off < seed.size(); off += 16) {
        const std::size_t n = std::min<std::size_t>(16, seed.size() - off);
        std::memset(block, 0, sizeof block);
        std::memcpy(block, seed.data() + off, n);
        state_[0] ^= load64(block);
        state_[1] ^= load64(block + 8);
        permute();
        ++pending_seed_blocks_;
    }
    state_[3] ^= seed.size();
    permute();
    ++pending_seed_blocks_;
}

void StrongPrng::permute() {
    for (int round = 0; round < 8; ++round) mix4(state_);
}

void StrongPrng::fill(std::span<std::uint8_t> out, ProbeContext& probes) {
    // Deferred keying cost: one probe burst per absorbed seed block.
    for (; pending_seed_blocks_ > 0; --pending_seed_blocks_) {
        probes.block(kBlockPrngSeed);
        probes.memory(kPrngStateAddr, 32);
        probes.branch(kSitePrngLoop, pending_seed_blocks_ > 1);
    }
    std::size_t produced = 0;
    while (produced < out.size()) {
        if (buffered_ == 0) {
            probes.block(kBlockSpongePrng);
            probes.memory(kPrngStateAddr, 32);
            store64(buffer_, state_[0]);
            store64(buffer_ + 8, state_[1]);
            permute();
            buffered_ = 16;
        }
        const std::size_t n = std::min(out.size() - produced, buffered_);
        std::memcpy(out.data() + produced, buffer_ + (16 - buffered_), n);
        buffered_ -= n;
        produced += n;
        probes.branch(kSitePrngLoop, produced < out.size());
    }
}

WeakPrng::WeakPrng(std::span<const std::uint8_t> seed) {
    state_ = 0x853c49e6748fea9bULL;
    for (std::size_t i = 0; i < seed.size(); ++i) {
        state_ = state_ * 6364136223846793005ULL + seed[i] + 1442695040888963407ULL;
    }
}

void WeakPrng::fill(std::span<std::uint8_t> out, ProbeContext& probes) {
    probes.block(kBlockLcg);
    std::size_t produced = 0;
    while (produced < out.size()) {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        std::uint8_t word[8];
        store64(word, state_);
        const std::size_t n = std::min<std::size_t>(8, out.size() - produced);
        std::memcpy(out.data() + produced, word, n);
        produced += n;
        if ((produced & 63) == 0) {
            probes.memory(kPrngStateAddr, 8);
            probes.branch(kSiteLcgLoop, produced < out.size());
        }
    }
}

std::unique_ptr<Prng> PrimitiveSuite::make_prng(std::span<const std::uint8_t> seed) const {
    if (weak_prng) return std::make_unique<WeakPrng>(seed);
    return std::make_unique<StrongPrng>(seed);
}

std::vector<std::uint8_t> strong_hash(std::span<const std::uint8_t> data,
                                      std::size_t out_len, ProbeContext& probes) {
    std::uint64_t state[8] = {
        0x636f756e74657273ULL, 0x69676e2d68617368ULL, 0x0101010101010101ULL, 0,
        0, 0, 0, 0x8000000000000000ULL ^ static_cast<std::uint64_t>(out_len)};

    // Absorb: rate 32 bytes, capacity 256 bits.
    std::uint8_t block[32];
    const std::size_t blocks = data.size() / 32 + 1;  // padded final block
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t off = b * 32;
        const std::size_t n = off < data.size() ? std::min<std::size_t>(32, data.size() - off) : 0;
        std::memset(block, 0, sizeof block);
        if (n > 0) std::memcpy(block, data.data() + off, n);
        block[n == 32 ? 0 : n] ^= (n == 32) ? 0 : 0x1f;  // pad10 marker on partial block
        for (int w = 0; w < 4; ++w) state[w] ^= load64(block + 8 * w);
        probes.block(kBlockSpongeAbsorb);
        probes.memory(kHashScratchAddr + off, n > 0 ? n : 1);
        probes.memory(kHashStateAddr, 64);
        permute8(state);
        probes.branch(kSiteAbsorbLoop, b + 1 < blocks);
    }

    // Squeeze 32 bytes per permutation.
    std::vector<std::uint8_t> out(out_len);
    std::size_t produced = 0;
    while (produced < out_len) {
        probes.block(kBlockSpongeSqueeze);
        probes.memory(kHashStateAddr, 64);
        std::uint8_t chunk[32];
        for (int w = 0; w < 4; ++w) store64(chunk + 8 * w, state[w]);
        const std::size_t n = std::min<std::size_t>(32, out_len - produced);
        std::memcpy(out.data() + produced, chunk, n);
        produced += n;
        probes.branch(kSiteSqueezeLoop, produced < out_len);
        if (produced < out_len) permute8(state);
    }
    return out;
}

std::vector<std::uint8_t> weak_hash(std::span<const std::uint8_t> data,
                                    std::size_t out_len, ProbeContext& probes) {
    // FNV-1a style 32-bit rolling digest.
    probes.block(kBlockRollDigest);
    std::uint32_t h = 0x811c9dc5u;
    for (std::size_t i = 0; i < data.size(); ++i) {
        h = (h ^ data[i]) * 0x01000193u;
        if ((i & 31) == 0) {
            probes.memory(kHashScratchAddr + i, 1);
            probes.branch(kSiteRollLoop, true);
        }
    }
    probes.branch(kSiteRollLoop, false);

    // Repeat the 4-byte digest to the requested length, truncated.
    probes.block(kBlockRollExpand);
    std::vector<std::uint8_t> out(out_len);
    const std::uint8_t digest[4] = {
        static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(h >> 8),
        static_cast<std::uint8_t>(h >> 16), static_cast<std::uint8_t>(h >> 24)};
    for (std::size_t i = 0; i < out_len; ++i) out[i] = digest[i % 4];
    if (out_len > 0) probes.memory(kHashScratchAddr, out_len);
    return out;
}

std::vector<std::uint8_t> PrimitiveSuite::hash(std::span<const std::uint8_t> data,
                                               std::size_t out_len,
                                               ProbeContext& probes) const {
    return weak_hash ? csign::weak_hash(data, out_len, probes)
                     : csign::strong_hash(data, out_len, probes);
}

std::string hex_digest(std::span<const std::uint8_t> data, std::size_t out_len) {
    ProbeContext muted = ProbeContext::muted();
    const auto digest = strong_hash(data, out_len, muted);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(digest.size() * 2);
    for (std::uint8_t b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xf]);
    }
    return out;
}

}  // namespace csign
