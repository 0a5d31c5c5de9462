#include "countersign/params.hpp"

#include <stdexcept>

namespace csign {
namespace {

bool is_pow2_u32(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

std::string to_string(SchemeId scheme) {
    switch (scheme) {
        case SchemeId::LATTICE: return "lattice";
        case SchemeId::HASHTREE: return "hashtree";
        case SchemeId::UOV: return "uov";
    }
    return "?";
}

std::string to_string(SubversionVariant variant) {
    switch (variant) {
        case SubversionVariant::TRUSTED: return "trusted";
        case SubversionVariant::PRNG: return "prng";
        case SubversionVariant::HASH: return "hash";
        case SubversionVariant::SPARAM: return "sparam";
    }
    return "?";
}

SchemeId scheme_from_string(const std::string& name) {
    if (name == "lattice") return SchemeId::LATTICE;
    if (name == "hashtree") return SchemeId::HASHTREE;
    if (name == "uov") return SchemeId::UOV;
    throw std::invalid_argument("unknown scheme: " + name);
}

SubversionVariant variant_from_string(const std::string& name) {
    if (name == "trusted") return SubversionVariant::TRUSTED;
    if (name == "prng") return SubversionVariant::PRNG;
    if (name == "hash") return SubversionVariant::HASH;
    if (name == "sparam") return SubversionVariant::SPARAM;
    throw std::invalid_argument("unknown variant: " + name);
}

void SchemeParams::validate() const {
    switch (scheme) {
        case SchemeId::LATTICE: {
            const auto& p = lattice;
            if (p.beta > p.gamma1) throw std::invalid_argument("lattice: beta > gamma1");
            if (p.gamma1 >= p.q) throw std::invalid_argument("lattice: gamma1 >= q");
            if (p.n == 0 || p.k == 0 || p.l == 0) throw std::invalid_argument("lattice: zero dimension");
            if (p.gamma2 < 2) throw std::invalid_argument("lattice: gamma2 too small");
            if (p.y_bound == 0 || p.y_bound >= p.gamma1)
                throw std::invalid_argument("lattice: y_bound out of range");
            break;
        }
        case SchemeId::HASHTREE: {
            const auto& p = hashtree;
            if (!is_pow2_u32(p.t)) throw std::invalid_argument("hashtree: t must be a power of two");
            if (p.h < 1) throw std::invalid_argument("hashtree: h must be >= 1");
            if (p.k < 1) throw std::invalid_argument("hashtree: k must be >= 1");
            if (p.n_bytes < 4) throw std::invalid_argument("hashtree: n_bytes too small");
            break;
        }
        case SchemeId::UOV: {
            const auto& p = uov;
            if (p.q < 2 || p.q > 256) throw std::invalid_argument("uov: q out of range");
            if (p.o1 == 0 || p.o2 == 0 || p.v1 == 0)
                throw std::invalid_argument("uov: zero parameter");
            if (p.m() != p.n_vars() - p.v1)
                throw std::invalid_argument("uov: m != n_vars - v1");
            break;
        }
        default:
            throw std::invalid_argument("unknown scheme id");
    }
}

TargetConfig apply_subversion(SchemeId scheme, SubversionVariant variant) {
    TargetConfig config;
    config.params.scheme = scheme;
    config.variant = variant;
    switch (variant) {
        case SubversionVariant::TRUSTED:
            break;
        case SubversionVariant::PRNG:
            config.primitives.weak_prng = true;
            break;
        case SubversionVariant::HASH:
            config.primitives.weak_hash = true;
            break;
        case SubversionVariant::SPARAM:
            switch (scheme) {
                case SchemeId::LATTICE:
                    config.params.lattice.beta = 0;
                    break;
                case SchemeId::HASHTREE:
                    config.params.hashtree.h = 3;
                    config.params.hashtree.k = 2;
                    config.params.hashtree.t = 2;
                    break;
                case SchemeId::UOV:
                    config.params.uov.o1 /= 2;
                    config.params.uov.o2 /= 2;
                    break;
                default:
                    throw std::invalid_argument("unknown scheme id");
            }
            break;
        default:
            throw std::invalid_argument("unknown variant");
    }
    config.params.validate();
    return config;
}

}  // namespace csign
