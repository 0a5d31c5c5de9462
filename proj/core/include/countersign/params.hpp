#pragma once

#include <cstdint>
#include <string>

#include "countersign/primitives.hpp"

namespace csign {

enum class SchemeId : std::uint8_t { LATTICE = 0, HASHTREE = 1, UOV = 2 };
enum class SubversionVariant : std::uint8_t { TRUSTED = 0, PRNG = 1, HASH = 2, SPARAM = 3 };

std::string to_string(SchemeId scheme);
std::string to_string(SubversionVariant variant);
SchemeId scheme_from_string(const std::string& name);
SubversionVariant variant_from_string(const std::string& name);

/// Rejection-sampling signature parameters (Dilithium-like toy scale).
/// y_bound is the sampler range for the nonce coefficients and is fixed at
/// build time; the bound checks compare against gamma1 - beta and
/// gamma2 - beta, which is where the SPARAM attack bites.
struct LatticeParams {
    std::uint32_t q = 3329;       // modulus
    std::uint32_t n = 64;         // ring degree
    std::uint32_t k = 2;          // rows of A
    std::uint32_t l = 2;          // columns of A
    std::uint32_t eta = 1;        // secret coefficient bound
    std::uint32_t tau = 4;        // challenge weight
    std::uint32_t gamma1 = 521;   // nonce bound parameter
    std::uint32_t gamma2 = 203;   // low-bits decomposition parameter
    std::uint32_t beta = 4;       // = tau * eta; rejection margin
    std::uint32_t omega = 128;    // hint weight cap
    std::uint32_t d = 0;          // public key truncation bits
    std::uint32_t y_bound = 512;  // nonce coefficients drawn from [-y_bound, y_bound]
    std::uint32_t max_iterations = 1000;
};

/// Merkle hyper-tree / FORS toy parameters.
struct HashTreeParams {
    std::uint32_t h = 8;        // top tree height
    std::uint32_t k = 4;        // FORS tree count
    std::uint32_t t = 64;       // leaves per FORS tree (power of two)
    std::uint32_t n_bytes = 16; // hash width
};

/// Unbalanced oil-and-vinegar toy parameters over GF(q).
/// Equation count m = o1 + o2; variable count = v1 + m.
struct UovParams {
    std::uint32_t q = 31;
    std::uint32_t v1 = 12;
    std::uint32_t o1 = 8;
    std::uint32_t o2 = 8;
    std::uint32_t max_attempts = 64;

    std::uint32_t m() const { return o1 + o2; }
    std::uint32_t n_vars() const { return v1 + o1 + o2; }
};

struct SchemeParams {
    SchemeId scheme = SchemeId::LATTICE;
    LatticeParams lattice;
    HashTreeParams hashtree;
    UovParams uov;

    /// Throws std::invalid_argument when a parameter invariant is broken.
    void validate() const;
};

/// A fully configured target build: parameters plus primitive suite.
struct TargetConfig {
    SchemeParams params;
    PrimitiveSuite primitives;
    SubversionVariant variant = SubversionVariant::TRUSTED;
};

/// Applies one of the three subversion classes to a trusted build.
/// TRUSTED is the identity; PRNG and HASH swap one primitive family;
/// SPARAM weakens the scheme's security parameters (lattice beta -> 0,
/// hashtree (h,k,t) scaled down, uov oil sets halved).
TargetConfig apply_subversion(SchemeId scheme, SubversionVariant variant);

}  // namespace csign
