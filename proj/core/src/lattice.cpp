#include "countersign/lattice.hpp"

#include <cstring>

namespace csign::lattice {
namespace {

// Probe ids 100..199 belong to the lattice target.
constexpr std::uint32_t kBlockExpand = 100;
constexpr std::uint32_t kBlockIterTop = 101;
constexpr std::uint32_t kBlockMatMul = 102;
constexpr std::uint32_t kBlockChallenge = 103;
constexpr std::uint32_t kBlockChecks = 104;
constexpr std::uint32_t kBlockAccept = 105;
constexpr std::uint32_t kBlockPack = 106;
constexpr std::uint32_t kBlockIterBucket = 110;   // ..124, one per iteration bucket
constexpr std::uint32_t kBlockRedrawBucket = 126; // ..131

constexpr std::uint32_t kSiteZCheck = 101;
constexpr std::uint32_t kSiteR0Check = 102;
constexpr std::uint32_t kSiteCt0Check = 103;
constexpr std::uint32_t kSiteHintCheck = 104;
constexpr std::uint32_t kSiteLoopBack = 105;
constexpr std::uint32_t kSiteScanZ = 106;
constexpr std::uint32_t kSiteScanR0 = 107;
constexpr std::uint32_t kSiteMulRow = 108;

constexpr std::uint32_t kCpSetup = 10;
constexpr std::uint32_t kCpIter = 11;     // multi-hit: loop entry
constexpr std::uint32_t kCpAccept = 12;
constexpr std::uint32_t kCpPack = 13;
constexpr std::uint32_t kCpDone = 14;
constexpr std::uint32_t kCpIterEnd = 15;  // multi-hit: after the bound checks

// Fixed virtual data layout (per-run cache state keys off these).
constexpr std::uint64_t kAddrA = 0x2000'0000;
constexpr std::uint64_t kAddrY = 0x2001'0000;
constexpr std::uint64_t kAddrW = 0x2002'0000;
constexpr std::uint64_t kAddrZ = 0x2003'0000;
constexpr std::uint64_t kAddrR0 = 0x2004'0000;
constexpr std::uint64_t kAddrHint = 0x2005'0000;
constexpr std::uint64_t kAddrPack = 0x2006'0000;
constexpr std::uint64_t kAddrKey = 0x2007'0000;

std::int32_t centered_mod(std::int64_t v, std::int32_t q) {
    std::int64_t r = v % q;
    if (r < 0) r += q;
    if (r > q / 2) r -= q;
    return static_cast<std::int32_t>(r);
}

// Nearest-multiple decomposition with odd alpha = 2*gamma2 - 1:
// r = r1 * alpha + r0, |r0| <= gamma2 - 1.
std::int32_t high_bits(std::int32_t r, std::int32_t alpha) {
    if (r >= 0) return (r + alpha / 2) / alpha;
    return -((-r + alpha / 2) / alpha);
}

std::int32_t low_bits(std::int32_t r, std::int32_t alpha) {
    return r - high_bits(r, alpha) * alpha;
}

// Negacyclic ring multiply-accumulate: acc += c * b over Z[x]/(x^n + 1),
// where c is the sparse challenge.
void add_sparse_product(Poly& acc, const Challenge& c, const Poly& b, int sign) {
    const std::size_t n = b.size();
    for (std::size_t j = 0; j < c.positions.size(); ++j) {
        const std::int32_t s = sign * c.signs[j];
        const std::uint32_t pos = c.positions[j];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t src = (i + n - pos) % n;
            // x^n = -1 wrap flips the sign for coefficients past the end.
            const bool wrapped = i < pos;
            acc[i] += (wrapped ? -s : s) * b[src];
        }
    }
}

Poly ring_mul(const Poly& a, const Poly& b, std::int32_t q) {
    const std::size_t n = a.size();
    std::vector<std::int64_t> acc(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = i + j;
            const std::int64_t prod = static_cast<std::int64_t>(a[i]) * b[j];
            if (idx < n) {
                acc[idx] += prod;
            } else {
                acc[idx - n] -= prod;
            }
        }
    }
    Poly out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = centered_mod(acc[i], q);
    return out;
}

// W = A * Y for the k x l matrix of ring elements, with line-level probes.
PolyVec mat_mul(const std::vector<PolyVec>& a, const PolyVec& y, std::int32_t q,
                ProbeContext& probes) {
    const std::size_t k = a.size();
    const std::size_t l = y.size();
    const std::size_t n = y[0].size();
    PolyVec w(k, Poly(n, 0));
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<std::int64_t> acc(n, 0);
        for (std::size_t j = 0; j < l; ++j) {
            probes.block(kBlockMatMul);
            probes.memory(kAddrA + (i * l + j) * n * 4, n * 4);
            probes.memory(kAddrY + j * n * 4, n * 4);
            probes.branch(kSiteMulRow, j + 1 < l);
            const Poly& aj = a[i][j];
            const Poly& yj = y[j];
            for (std::size_t ai = 0; ai < n; ++ai) {
                if (aj[ai] == 0) continue;
                const std::int64_t av = aj[ai];
                for (std::size_t bi = 0; bi < n; ++bi) {
                    const std::size_t idx = ai + bi;
                    const std::int64_t prod = av * yj[bi];
                    if (idx < n) {
                        acc[idx] += prod;
                    } else {
                        acc[idx - n] -= prod;
                    }
                }
            }
        }
        for (std::size_t ci = 0; ci < n; ++ci) w[i][ci] = centered_mod(acc[ci], q);
        probes.memory(kAddrW + i * n * 4, n * 4);
    }
    return w;
}

Poly sample_uniform_poly(Prng& prng, std::uint32_t n, std::uint32_t q,
                         ProbeContext& probes) {
    Poly p(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        p[i] = centered_mod(static_cast<std::int64_t>(prng.bounded(q, probes)),
                            static_cast<std::int32_t>(q));
    }
    return p;
}

std::vector<std::uint8_t> pack_poly_vec(const PolyVec& v, std::int32_t offset) {
    std::vector<std::uint8_t> out;
    out.reserve(v.size() * v[0].size() * 2);
    for (const auto& p : v) {
        for (std::int32_t c : p) {
            const std::uint32_t u = static_cast<std::uint32_t>(c + offset);
            out.push_back(static_cast<std::uint8_t>(u));
            out.push_back(static_cast<std::uint8_t>(u >> 8));
        }
    }
    return out;
}

std::uint32_t infinity_norm_scan(const PolyVec& v, std::uint32_t site, std::uint64_t addr,
                                 std::uint32_t bound, ProbeContext& probes) {
    // Early-exit magnitude scan: stops at the first coefficient >= bound.
    std::uint32_t max_abs = 0;
    for (std::size_t pi = 0; pi < v.size(); ++pi) {
        const Poly& p = v[pi];
        for (std::size_t i = 0; i < p.size(); ++i) {
            if ((i % 16) == 0) {
                probes.memory(addr + (pi * p.size() + i) * 4, 64);
            }
            const std::uint32_t mag = static_cast<std::uint32_t>(p[i] < 0 ? -p[i] : p[i]);
            if (mag > max_abs) max_abs = mag;
            if (mag >= bound) {
                probes.branch(site, true);
                return max_abs;
            }
        }
    }
    probes.branch(site, false);
    return max_abs;
}

std::uint32_t bucket_index(std::uint32_t count) {
    // Finer-grained at the high end than classic hit-count bucketing: deep
    // rejection streaks are exactly the inputs worth keeping as seeds.
    if (count <= 3) return count;          // 0,1,2,3
    if (count <= 7) return 4;
    if (count <= 15) return 5;
    if (count <= 23) return 6;
    if (count <= 31) return 7;
    if (count <= 47) return 8;
    if (count <= 63) return 9;
    if (count <= 95) return 10;
    if (count <= 127) return 11;
    if (count <= 191) return 12;
    if (count <= 255) return 13;
    return 14;
}

struct DrawResult {
    PolyVec y;
    std::uint32_t redraws = 0;
};

DrawResult draw_nonce(Prng& prng, const LatticeParams& params, ProbeContext& probes) {
    DrawResult out;
    const std::uint32_t range = 2 * params.y_bound + 1;
    const std::uint32_t limit = (65536u / range) * range;
    out.y.assign(params.l, Poly(params.n, 0));
    for (std::uint32_t j = 0; j < params.l; ++j) {
        for (std::uint32_t i = 0; i < params.n; ++i) {
            for (;;) {
                const std::uint32_t v = prng.next_u16(probes);
                if (v < limit) {
                    out.y[j][i] = static_cast<std::int32_t>(v % range) -
                                  static_cast<std::int32_t>(params.y_bound);
                    break;
                }
                ++out.redraws;
            }
        }
        probes.memory(kAddrY + j * params.n * 4, params.n * 4);
    }
    return out;
}

}  // namespace

Challenge challenge_from_digest(std::span<const std::uint8_t> digest, std::uint32_t n,
                                std::uint32_t tau) {
    // Deterministic expansion independent of the primitive suite: a small
    // splitmix stream seeded from the digest picks distinct positions.
    std::uint64_t x = 0x43484c4c5f763031ULL;
    for (std::uint8_t b : digest) x = (x ^ b) * 0x100000001b3ULL;
    auto next = [&x]() {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };

    Challenge c;
    std::uint32_t redraws = 0;
    while (c.positions.size() < tau) {
        const std::uint32_t pos = static_cast<std::uint32_t>(next() % n);
        bool dup = false;
        for (std::uint32_t p : c.positions) dup |= (p == pos);
        if (dup) {
            ++redraws;
            continue;
        }
        c.positions.push_back(pos);
        c.signs.push_back((next() & 1) ? 1 : -1);
    }
    (void)redraws;
    return c;
}

KeyPair keygen(std::span<const std::uint8_t> key_seed, const LatticeParams& params,
               const PrimitiveSuite& suite, ProbeContext& probes) {
    KeyPair keys;
    std::vector<std::uint8_t> seed(key_seed.begin(), key_seed.end());
    seed.push_back(0x00);
    keys.rho = suite.hash(seed, 16, probes);
    seed.back() = 0x01;
    const auto secret_seed = suite.hash(seed, 32, probes);

    auto secret_prng = suite.make_prng(secret_seed);
    const std::uint32_t eta_range = 2 * params.eta + 1;
    auto draw_secret_vec = [&](std::uint32_t count) {
        PolyVec v(count, Poly(params.n, 0));
        for (auto& p : v) {
            for (auto& coeff : p) {
                coeff = static_cast<std::int32_t>(secret_prng->bounded(eta_range, probes)) -
                        static_cast<std::int32_t>(params.eta);
            }
        }
        return v;
    };
    keys.s1 = draw_secret_vec(params.l);
    keys.s2 = draw_secret_vec(params.k);

    // A is expanded from rho on demand by sign/verify; t = A*s1 + s2.
    auto a_prng = suite.make_prng(keys.rho);
    keys.t.assign(params.k, Poly(params.n, 0));
    std::vector<PolyVec> a(params.k, PolyVec());
    for (std::uint32_t i = 0; i < params.k; ++i) {
        for (std::uint32_t j = 0; j < params.l; ++j) {
            a[i].push_back(sample_uniform_poly(*a_prng, params.n, params.q, probes));
        }
    }
    for (std::uint32_t i = 0; i < params.k; ++i) {
        std::vector<std::int64_t> acc(params.n, 0);
        for (std::uint32_t j = 0; j < params.l; ++j) {
            const Poly prod = ring_mul(a[i][j], keys.s1[j], static_cast<std::int32_t>(params.q));
            for (std::uint32_t ci = 0; ci < params.n; ++ci) acc[ci] += prod[ci];
        }
        for (std::uint32_t ci = 0; ci < params.n; ++ci) {
            keys.t[i][ci] = centered_mod(acc[ci] + keys.s2[i][ci],
                                         static_cast<std::int32_t>(params.q));
        }
    }
    return keys;
}

namespace {

std::vector<PolyVec> expand_a(const KeyPair& keys, const LatticeParams& params,
                              const PrimitiveSuite& suite, ProbeContext& probes) {
    auto a_prng = suite.make_prng(keys.rho);
    std::vector<PolyVec> a(params.k);
    for (std::uint32_t i = 0; i < params.k; ++i) {
        for (std::uint32_t j = 0; j < params.l; ++j) {
            probes.block(kBlockExpand);
            a[i].push_back(sample_uniform_poly(*a_prng, params.n, params.q, probes));
            probes.memory(kAddrA + (i * params.l + j) * params.n * 4, params.n * 4);
        }
    }
    return a;
}

std::vector<std::uint8_t> message_bind(const KeyPair& keys, std::span<const std::uint8_t> msg,
                                       const LatticeParams& params, const PrimitiveSuite& suite,
                                       ProbeContext& probes) {
    auto bound = pack_poly_vec(keys.t, static_cast<std::int32_t>(params.q));
    bound.insert(bound.end(), keys.rho.begin(), keys.rho.end());
    bound.insert(bound.end(), msg.begin(), msg.end());
    return suite.hash(bound, 32, probes);
}

}  // namespace

std::optional<Signature> sign(const KeyPair& keys, std::span<const std::uint8_t> msg,
                              const LatticeParams& params, const PrimitiveSuite& suite,
                              ProbeContext& probes, std::uint64_t call_idx,
                              SignStats* stats) {
    const std::int32_t q = static_cast<std::int32_t>(params.q);
    const std::int32_t alpha = 2 * static_cast<std::int32_t>(params.gamma2) - 1;

    probes.memory(kAddrKey, params.n * 4 * (params.k + params.l));
    const auto a = expand_a(keys, params, suite, probes);
    const auto mu = message_bind(keys, msg, params, suite, probes);
    probes.checkpoint(kCpSetup);

    SignStats local_stats;
    SignStats& st = stats ? *stats : local_stats;
    st = SignStats{};

    Signature sig;
    std::uint32_t max_redraws = 0;

    for (std::uint32_t iter = 0; iter < params.max_iterations; ++iter) {
        probes.checkpoint(kCpIter);
        probes.block(kBlockIterTop);
        st.iterations = iter + 1;

        // Fresh per-iteration nonce seed (deterministic signing).
        std::vector<std::uint8_t> nonce_seed(mu.begin(), mu.end());
        nonce_seed.push_back(0x02);
        for (int b = 0; b < 8; ++b) {
            nonce_seed.push_back(static_cast<std::uint8_t>(call_idx >> (8 * b)));
        }
        for (int b = 0; b < 4; ++b) {
            nonce_seed.push_back(static_cast<std::uint8_t>(iter >> (8 * b)));
        }
        const auto rho2 = suite.hash(nonce_seed, 32, probes);
        auto y_prng = suite.make_prng(rho2);
        DrawResult draw = draw_nonce(*y_prng, params, probes);
        max_redraws = std::max(max_redraws, draw.redraws);

        const PolyVec w = mat_mul(a, draw.y, q, probes);

        PolyVec w1(params.k, Poly(params.n, 0));
        for (std::uint32_t i = 0; i < params.k; ++i) {
            for (std::uint32_t ci = 0; ci < params.n; ++ci) {
                w1[i][ci] = high_bits(w[i][ci], alpha);
            }
        }

        probes.block(kBlockChallenge);
        std::vector<std::uint8_t> chal_input(mu.begin(), mu.end());
        const auto w1_packed = pack_poly_vec(w1, 64);
        chal_input.insert(chal_input.end(), w1_packed.begin(), w1_packed.end());
        const auto c_digest = suite.hash(chal_input, 16, probes);
        const Challenge c = challenge_from_digest(c_digest, params.n, params.tau);

        // Z = Y + C*S1
        PolyVec z = draw.y;
        for (std::uint32_t j = 0; j < params.l; ++j) {
            add_sparse_product(z[j], c, keys.s1[j], +1);
        }
        probes.memory(kAddrZ, params.l * params.n * 4);

        // R = W - C*S2 and its decomposition.
        PolyVec r(params.k, Poly(params.n, 0));
        for (std::uint32_t i = 0; i < params.k; ++i) {
            r[i] = w[i];
            add_sparse_product(r[i], c, keys.s2[i], -1);
            for (auto& coeff : r[i]) coeff = centered_mod(coeff, q);
        }
        PolyVec r0(params.k, Poly(params.n, 0));
        for (std::uint32_t i = 0; i < params.k; ++i) {
            for (std::uint32_t ci = 0; ci < params.n; ++ci) {
                r0[i][ci] = low_bits(r[i][ci], alpha);
            }
        }
        probes.memory(kAddrR0, params.k * params.n * 4);

        probes.block(kBlockChecks);
        const std::uint32_t z_bound = params.gamma1 - params.beta;
        const std::uint32_t z_norm = infinity_norm_scan(z, kSiteScanZ, kAddrZ, z_bound, probes);
        const bool z_reject = z_norm >= z_bound;
        probes.branch(kSiteZCheck, z_reject);
        if (z_reject) {
            ++st.z_rejections;
            probes.checkpoint(kCpIterEnd);
            probes.branch(kSiteLoopBack, true);
            continue;
        }

        const std::uint32_t r0_bound = params.gamma2 - params.beta;
        const std::uint32_t r0_norm = infinity_norm_scan(r0, kSiteScanR0, kAddrR0, r0_bound, probes);
        const bool r0_reject = r0_norm >= r0_bound;
        probes.branch(kSiteR0Check, r0_reject);
        if (r0_reject) {
            ++st.r0_rejections;
            probes.checkpoint(kCpIterEnd);
            probes.branch(kSiteLoopBack, true);
            continue;
        }

        // ||C*T0|| check; T0 is identically zero at d = 0, the branch stays.
        const bool ct0_reject = false;
        probes.branch(kSiteCt0Check, ct0_reject);

        // Hint: sparse corrections from HighBits(W - C*S2) to W1.
        sig.hints.clear();
        for (std::uint32_t i = 0; i < params.k; ++i) {
            for (std::uint32_t ci = 0; ci < params.n; ++ci) {
                const std::int32_t vh = high_bits(r[i][ci], alpha);
                if (vh != w1[i][ci]) {
                    sig.hints.push_back({static_cast<std::uint16_t>(i),
                                         static_cast<std::uint16_t>(ci), w1[i][ci] - vh});
                }
            }
        }
        st.hint_weight = static_cast<std::uint32_t>(sig.hints.size());
        const bool hint_reject = st.hint_weight > params.omega;
        probes.branch(kSiteHintCheck, hint_reject);
        if (hint_reject) {
            probes.checkpoint(kCpIterEnd);
            probes.branch(kSiteLoopBack, true);
            continue;
        }

        sig.c_digest = c_digest;
        sig.z = std::move(z);
        probes.checkpoint(kCpIterEnd);
        probes.branch(kSiteLoopBack, false);
        break;
    }

    if (sig.c_digest.empty()) return std::nullopt;  // iteration cap exceeded

    probes.checkpoint(kCpAccept);
    probes.block(kBlockAccept);
    probes.block(kBlockIterBucket + bucket_index(st.iterations));
    probes.block(kBlockRedrawBucket + std::min<std::uint32_t>(bucket_index(max_redraws), 5));

    // Pack phase, bracketed by a double-hit checkpoint so the second hit
    // measures the phase alone.
    probes.checkpoint(kCpPack);
    probes.block(kBlockPack);
    std::vector<std::uint8_t> packed;
    packed.reserve(params.l * params.n * 2 + sig.hints.size() * 4 + 16);
    for (const auto& p : sig.z) {
        for (std::int32_t coeff : p) {
            const std::uint32_t u = static_cast<std::uint32_t>(coeff + static_cast<std::int32_t>(params.gamma1));
            packed.push_back(static_cast<std::uint8_t>(u));
            packed.push_back(static_cast<std::uint8_t>(u >> 8));
        }
    }
    probes.memory(kAddrPack, packed.size());
    for (const auto& h : sig.hints) {
        packed.push_back(static_cast<std::uint8_t>(h.vec));
        packed.push_back(static_cast<std::uint8_t>(h.coeff));
        packed.push_back(static_cast<std::uint8_t>(h.corr + 8));
        probes.memory(kAddrHint + sig.hints.size() * 4, 4);
    }
    packed.insert(packed.end(), sig.c_digest.begin(), sig.c_digest.end());
    probes.checkpoint(kCpPack);

    probes.checkpoint(kCpDone);
    return sig;
}

bool verify(const KeyPair& keys, std::span<const std::uint8_t> msg, const Signature& sig,
            const LatticeParams& original_params, const PrimitiveSuite& suite) {
    const LatticeParams& params = original_params;
    if (sig.c_digest.size() != 16) return false;
    if (sig.z.size() != params.l) return false;
    for (const auto& p : sig.z) {
        if (p.size() != params.n) return false;
    }
    for (const auto& h : sig.hints) {
        if (h.vec >= params.k || h.coeff >= params.n) return false;
    }

    ProbeContext muted = ProbeContext::muted();
    const std::int32_t q = static_cast<std::int32_t>(params.q);
    const std::int32_t alpha = 2 * static_cast<std::int32_t>(params.gamma2) - 1;

    // ||Z||_inf bound with the unsubverted beta.
    const std::uint32_t z_bound = params.gamma1 - params.beta;
    for (const auto& p : sig.z) {
        for (std::int32_t coeff : p) {
            const std::uint32_t mag = static_cast<std::uint32_t>(coeff < 0 ? -coeff : coeff);
            if (mag >= z_bound) return false;
        }
    }

    const auto a = expand_a(keys, params, suite, muted);
    const auto mu = message_bind(keys, msg, params, suite, muted);
    const Challenge c = challenge_from_digest(sig.c_digest, params.n, params.tau);

    // V = A*Z - C*T  (equals W - C*S2 for honest signatures at d = 0).
    const PolyVec az = mat_mul(a, sig.z, q, muted);
    PolyVec v(params.k, Poly(params.n, 0));
    for (std::uint32_t i = 0; i < params.k; ++i) {
        v[i] = az[i];
        add_sparse_product(v[i], c, keys.t[i], -1);
        for (auto& coeff : v[i]) coeff = centered_mod(coeff, q);
    }

    PolyVec w1(params.k, Poly(params.n, 0));
    for (std::uint32_t i = 0; i < params.k; ++i) {
        for (std::uint32_t ci = 0; ci < params.n; ++ci) {
            w1[i][ci] = high_bits(v[i][ci], alpha);
        }
    }
    for (const auto& h : sig.hints) {
        w1[h.vec][h.coeff] += h.corr;
    }

    std::vector<std::uint8_t> chal_input(mu.begin(), mu.end());
    const auto w1_packed = pack_poly_vec(w1, 64);
    chal_input.insert(chal_input.end(), w1_packed.begin(), w1_packed.end());
    const auto expected = suite.hash(chal_input, 16, muted);
    return expected == sig.c_digest;
}

}  // namespace csign::lattice
