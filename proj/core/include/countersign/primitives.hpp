#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "countersign/probes.hpp"

namespace csign {

/// Byte-stream generator. Both variants return identical-length output for
/// identical requests, so the weak one is a drop-in substitution.
class Prng {
public:
    virtual ~Prng() = default;
    virtual void fill(std::span<std::uint8_t> out, ProbeContext& probes) = 0;

    std::uint8_t next_byte(ProbeContext& probes) {
        std::uint8_t b;
        fill({&b, 1}, probes);
        return b;
    }

    std::uint16_t next_u16(ProbeContext& probes) {
        std::uint8_t b[2];
        fill(b, probes);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    /// Uniform in [0, bound) by rejection on 16-bit draws; bound <= 65536.
    std::uint32_t bounded(std::uint32_t bound, ProbeContext& probes);
};

/// Sponge stream over a 256-bit state, reseeded once from the seed bytes.
/// The keying work (one permutation per absorbed block) is probed on first
/// use; the LCG below has no comparable keying cost.
class StrongPrng final : public Prng {
public:
    explicit StrongPrng(std::span<const std::uint8_t> seed);
    void fill(std::span<std::uint8_t> out, ProbeContext& probes) override;

private:
    void permute();
    std::uint64_t state_[4];
    std::uint8_t buffer_[16];
    std::size_t buffered_ = 0;
    std::uint32_t pending_seed_blocks_ = 0;
};

/// 64-bit linear congruential generator; the PRNG-subversion stand-in.
class WeakPrng final : public Prng {
public:
    explicit WeakPrng(std::span<const std::uint8_t> seed);
    void fill(std::span<std::uint8_t> out, ProbeContext& probes) override;

private:
    std::uint64_t state_;
};

/// Primitive selection for one target build. Swapping a flag swaps the
/// whole family; output lengths never change.
struct PrimitiveSuite {
    bool weak_prng = false;
    bool weak_hash = false;

    std::unique_ptr<Prng> make_prng(std::span<const std::uint8_t> seed) const;

    /// Hashes data to out_len bytes. Strong: sponge with 256-bit capacity.
    /// Weak: 32-bit multiplicative rolling digest whose 4-byte output is
    /// repeated to out_len and truncated.
    std::vector<std::uint8_t> hash(std::span<const std::uint8_t> data,
                                   std::size_t out_len, ProbeContext& probes) const;
};

std::vector<std::uint8_t> strong_hash(std::span<const std::uint8_t> data,
                                      std::size_t out_len, ProbeContext& probes);
std::vector<std::uint8_t> weak_hash(std::span<const std::uint8_t> data,
                                    std::size_t out_len, ProbeContext& probes);

/// Convenience for config digests and corpus fingerprints: strong hash with
/// no probe emission, hex encoded.
std::string hex_digest(std::span<const std::uint8_t> data, std::size_t out_len = 16);

}  // namespace csign
