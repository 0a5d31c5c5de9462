#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "countersign/params.hpp"
#include "countersign/probes.hpp"

namespace csign::lattice {

using Poly = std::vector<std::int32_t>;      // length n, coefficients centered mod q
using PolyVec = std::vector<Poly>;

struct KeyPair {
    std::vector<std::uint8_t> rho;  // public matrix seed
    PolyVec t;                      // public: t = A*s1 + s2
    PolyVec s1;                     // secret
    PolyVec s2;                     // secret
};

/// Challenge: tau positions with signs, expanded from a digest.
struct Challenge {
    std::vector<std::uint32_t> positions;
    std::vector<std::int8_t> signs;
};

struct Signature {
    std::vector<std::uint8_t> c_digest;
    PolyVec z;
    // Sparse high-bits corrections (vector index, coefficient, correction).
    struct HintEntry {
        std::uint16_t vec;
        std::uint16_t coeff;
        std::int32_t corr;
    };
    std::vector<HintEntry> hints;
};

struct SignStats {
    std::uint32_t iterations = 0;
    std::uint32_t z_rejections = 0;
    std::uint32_t r0_rejections = 0;
    std::uint32_t hint_weight = 0;
};

KeyPair keygen(std::span<const std::uint8_t> key_seed, const LatticeParams& params,
               const PrimitiveSuite& suite, ProbeContext& probes);

/// Rejection-sampling signer. Draws the nonce vector from the PRNG, runs the
/// bound checks against gamma1 - beta and gamma2 - beta and restarts the
/// loop on violation. Returns nullopt when max_iterations is exceeded.
std::optional<Signature> sign(const KeyPair& keys, std::span<const std::uint8_t> msg,
                              const LatticeParams& params, const PrimitiveSuite& suite,
                              ProbeContext& probes, std::uint64_t call_idx = 0,
                              SignStats* stats = nullptr);

/// Honest verifier: recomputes W1 from (Z, C, public key, hints) and accepts
/// iff the challenge digest matches and ||Z||_inf < gamma1 - beta for the
/// *original* (unsubverted) bound parameters.
bool verify(const KeyPair& keys, std::span<const std::uint8_t> msg, const Signature& sig,
            const LatticeParams& original_params, const PrimitiveSuite& suite);

/// Challenge expansion is a pure function of the digest so signer and
/// verifier agree regardless of the primitive suite in use.
Challenge challenge_from_digest(std::span<const std::uint8_t> digest, std::uint32_t n,
                                std::uint32_t tau);

}  // namespace csign::lattice
