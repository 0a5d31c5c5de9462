#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "countersign/params.hpp"
#include "countersign/probes.hpp"

namespace csign::uov {

/// Dense matrix over GF(q), row-major, elements in [0, q).
struct Matrix {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t& at(std::uint32_t r, std::uint32_t c) { return data[r * cols + c]; }
    std::uint8_t at(std::uint32_t r, std::uint32_t c) const { return data[r * cols + c]; }
};

struct KeyPair {
    std::uint32_t q = 31;
    // Secret: central map quadratic forms (oil x oil block zero) and the
    // invertible variable change T with its inverse.
    std::vector<Matrix> central;  // m matrices, n_vars x n_vars upper triangular
    Matrix t;                     // n_vars x n_vars
    Matrix t_inv;
    // Public: composed quadratic forms P_i = F_i ∘ T and their digest.
    std::vector<Matrix> public_forms;
    std::vector<std::uint8_t> pk_digest;
};

struct Signature {
    std::vector<std::uint8_t> x;  // n_vars field elements
};

struct SignStats {
    std::uint32_t attempts = 0;
    std::uint32_t pivot_swaps = 0;
    std::uint32_t row_ops = 0;
};

KeyPair keygen(std::span<const std::uint8_t> key_seed, const UovParams& params,
               const PrimitiveSuite& suite, ProbeContext& probes);

/// Fixes v1 PRNG-drawn vinegar variables, solves the induced m x m linear
/// system for the oil block by Gaussian elimination, and retries with fresh
/// vinegar on a singular system. nullopt when max_attempts is exceeded.
std::optional<Signature> sign(const KeyPair& keys, std::span<const std::uint8_t> msg,
                              const UovParams& params, const PrimitiveSuite& suite,
                              ProbeContext& probes, std::uint64_t call_idx = 0,
                              SignStats* stats = nullptr);

/// Evaluates every public form at the signature and compares with the
/// message digest. The equation count comes from the public key.
bool verify(const KeyPair& keys, std::span<const std::uint8_t> msg, const Signature& sig,
            const PrimitiveSuite& suite);

}  // namespace csign::uov
