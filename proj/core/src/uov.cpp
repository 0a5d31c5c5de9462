#include "countersign/uov.hpp"

#include <algorithm>

namespace csign::uov {
namespace {

// Probe ids 300..399 belong to the uov target.
constexpr std::uint32_t kBlockDigest = 300;
constexpr std::uint32_t kBlockVinegar = 301;
constexpr std::uint32_t kBlockBuildRow = 302;
constexpr std::uint32_t kBlockEliminate = 303;
constexpr std::uint32_t kBlockBackSub = 304;
constexpr std::uint32_t kBlockCompose = 305;
constexpr std::uint32_t kBlockPack = 306;
constexpr std::uint32_t kBlockAttemptBucket = 310;  // ..313
constexpr std::uint32_t kBlockSwapBucket = 315;     // ..320
constexpr std::uint32_t kBlockZeroBucket = 322;     // ..325

constexpr std::uint32_t kSitePivotSearch = 301;
constexpr std::uint32_t kSiteSingular = 302;
constexpr std::uint32_t kSiteRowLoop = 303;
constexpr std::uint32_t kSiteAttemptLoop = 304;

constexpr std::uint32_t kCpEntry = 30;
constexpr std::uint32_t kCpAttempt = 31;
constexpr std::uint32_t kCpSolved = 32;
constexpr std::uint32_t kCpPack = 33;
constexpr std::uint32_t kCpDone = 34;
constexpr std::uint32_t kCpPivotColumn = 35;  // multi-hit: one per eliminated column

constexpr std::uint64_t kAddrSystem = 0x2200'0000;
constexpr std::uint64_t kAddrVinegar = 0x2201'0000;
constexpr std::uint64_t kAddrSolution = 0x2202'0000;
constexpr std::uint64_t kAddrForms = 0x2210'0000;

std::uint8_t mul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
    return static_cast<std::uint8_t>((a * b) % q);
}

std::uint8_t inv_mod(std::uint32_t a, std::uint32_t q) {
    // q is small and prime; Fermat exponentiation is plenty.
    std::uint32_t result = 1;
    std::uint32_t base = a % q;
    std::uint32_t e = q - 2;
    while (e > 0) {
        if (e & 1) result = (result * base) % q;
        base = (base * base) % q;
        e >>= 1;
    }
    return static_cast<std::uint8_t>(result);
}

// y^T M y over GF(q).
std::uint8_t eval_form(const Matrix& m, std::span<const std::uint8_t> x, std::uint32_t q) {
    std::uint32_t acc = 0;
    for (std::uint32_t r = 0; r < m.rows; ++r) {
        if (x[r] == 0) continue;
        std::uint32_t row_acc = 0;
        for (std::uint32_t c = 0; c < m.cols; ++c) {
            row_acc += static_cast<std::uint32_t>(m.at(r, c)) * x[c];
        }
        acc += (row_acc % q) * x[r];
    }
    return static_cast<std::uint8_t>(acc % q);
}

Matrix mat_mul_mod(const Matrix& a, const Matrix& b, std::uint32_t q) {
    Matrix out;
    out.rows = a.rows;
    out.cols = b.cols;
    out.data.assign(static_cast<std::size_t>(out.rows) * out.cols, 0);
    for (std::uint32_t i = 0; i < a.rows; ++i) {
        for (std::uint32_t k = 0; k < a.cols; ++k) {
            const std::uint32_t av = a.at(i, k);
            if (av == 0) continue;
            for (std::uint32_t j = 0; j < b.cols; ++j) {
                out.at(i, j) = static_cast<std::uint8_t>((out.at(i, j) + av * b.at(k, j)) % q);
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out;
    out.rows = a.cols;
    out.cols = a.rows;
    out.data.assign(a.data.size(), 0);
    for (std::uint32_t i = 0; i < a.rows; ++i) {
        for (std::uint32_t j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    }
    return out;
}

std::vector<std::uint8_t> message_digest(const KeyPair& keys, std::span<const std::uint8_t> msg,
                                         std::uint32_t m, std::uint32_t q,
                                         const PrimitiveSuite& suite, ProbeContext& probes) {
    std::vector<std::uint8_t> input(keys.pk_digest);
    input.insert(input.end(), msg.begin(), msg.end());
    const auto raw = suite.hash(input, m * 2, probes);
    std::vector<std::uint8_t> digest(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        digest[i] = static_cast<std::uint8_t>((raw[2 * i] | (raw[2 * i + 1] << 8)) % q);
    }
    return digest;
}

}  // namespace

KeyPair keygen(std::span<const std::uint8_t> key_seed, const UovParams& params,
               const PrimitiveSuite& suite, ProbeContext& probes) {
    const std::uint32_t n = params.n_vars();
    const std::uint32_t m = params.m();
    const std::uint32_t q = params.q;

    std::vector<std::uint8_t> seed(key_seed.begin(), key_seed.end());
    seed.push_back(0x30);
    const auto expand_seed = suite.hash(seed, 32, probes);
    auto prng = suite.make_prng(expand_seed);

    KeyPair keys;
    keys.q = q;

    // Central map: upper-triangular quadratic forms with zero oil x oil block.
    keys.central.reserve(m);
    for (std::uint32_t e = 0; e < m; ++e) {
        Matrix f;
        f.rows = n;
        f.cols = n;
        f.data.assign(static_cast<std::size_t>(n) * n, 0);
        for (std::uint32_t r = 0; r < n; ++r) {
            for (std::uint32_t c = r; c < n; ++c) {
                const bool both_oil = r >= params.v1 && c >= params.v1;
                if (both_oil) continue;
                f.at(r, c) = static_cast<std::uint8_t>(prng->bounded(q, probes));
            }
        }
        keys.central.push_back(std::move(f));
    }

    // T = L * U with unit lower L and unit diagonal U: always invertible.
    Matrix lower, upper;
    lower.rows = lower.cols = upper.rows = upper.cols = n;
    lower.data.assign(static_cast<std::size_t>(n) * n, 0);
    upper.data.assign(static_cast<std::size_t>(n) * n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        lower.at(i, i) = 1;
        upper.at(i, i) = 1;
        for (std::uint32_t j = 0; j < i; ++j) {
            lower.at(i, j) = static_cast<std::uint8_t>(prng->bounded(q, probes));
        }
        for (std::uint32_t j = i + 1; j < n; ++j) {
            upper.at(i, j) = static_cast<std::uint8_t>(prng->bounded(q, probes));
        }
    }
    keys.t = mat_mul_mod(lower, upper, q);

    // Invert by forward/back substitution on the triangular factors.
    auto invert_unit_lower = [&](const Matrix& l) {
        Matrix inv;
        inv.rows = inv.cols = n;
        inv.data.assign(static_cast<std::size_t>(n) * n, 0);
        for (std::uint32_t i = 0; i < n; ++i) inv.at(i, i) = 1;
        for (std::uint32_t col = 0; col < n; ++col) {
            for (std::uint32_t row = col + 1; row < n; ++row) {
                std::uint32_t acc = 0;
                for (std::uint32_t k = col; k < row; ++k) {
                    acc += static_cast<std::uint32_t>(l.at(row, k)) * inv.at(k, col);
                }
                inv.at(row, col) = static_cast<std::uint8_t>((q - acc % q) % q);
            }
        }
        return inv;
    };
    const Matrix lower_inv = invert_unit_lower(lower);
    const Matrix upper_inv = transpose(invert_unit_lower(transpose(upper)));
    keys.t_inv = mat_mul_mod(upper_inv, lower_inv, q);

    // Public forms: P_i = T^T F_i T, symmetrized away from the oil block is
    // unnecessary; evaluation uses the matrix as-is.
    keys.public_forms.reserve(m);
    const Matrix t_t = transpose(keys.t);
    for (std::uint32_t e = 0; e < m; ++e) {
        keys.public_forms.push_back(mat_mul_mod(t_t, mat_mul_mod(keys.central[e], keys.t, q), q));
    }

    std::vector<std::uint8_t> pk_bytes;
    pk_bytes.reserve(m * n * n);
    for (const auto& p : keys.public_forms) {
        pk_bytes.insert(pk_bytes.end(), p.data.begin(), p.data.end());
    }
    keys.pk_digest = suite.hash(pk_bytes, 16, probes);
    return keys;
}

std::optional<Signature> sign(const KeyPair& keys, std::span<const std::uint8_t> msg,
                              const UovParams& params, const PrimitiveSuite& suite,
                              ProbeContext& probes, std::uint64_t call_idx,
                              SignStats* stats) {
    const std::uint32_t n = params.n_vars();
    const std::uint32_t m = params.m();
    const std::uint32_t q = params.q;
    SignStats local;
    SignStats& st = stats ? *stats : local;
    st = SignStats{};

    probes.block(kBlockDigest);
    const auto digest = message_digest(keys, msg, m, q, suite, probes);
    std::uint32_t zero_elems = 0;
    for (std::uint8_t d : digest) zero_elems += (d == 0);
    probes.block(kBlockZeroBucket + std::min<std::uint32_t>(zero_elems, 3));
    probes.checkpoint(kCpEntry);

    for (std::uint32_t attempt = 0; attempt < params.max_attempts; ++attempt) {
        st.attempts = attempt + 1;

        // Fresh vinegar assignment per attempt.
        probes.block(kBlockVinegar);
        std::vector<std::uint8_t> vseed(keys.pk_digest);
        vseed.push_back(0x31);
        vseed.insert(vseed.end(), msg.begin(), msg.end());
        for (int b = 0; b < 8; ++b) vseed.push_back(static_cast<std::uint8_t>(call_idx >> (8 * b)));
        vseed.push_back(static_cast<std::uint8_t>(attempt));
        const auto vexp = suite.hash(vseed, 32, probes);
        auto vprng = suite.make_prng(vexp);
        std::vector<std::uint8_t> vinegar(params.v1);
        for (auto& v : vinegar) v = static_cast<std::uint8_t>(vprng->bounded(q, probes));
        probes.memory(kAddrVinegar, params.v1);

        // Induced linear system A * oil = rhs over the m oil variables.
        Matrix system;
        system.rows = m;
        system.cols = m + 1;  // augmented
        system.data.assign(static_cast<std::size_t>(m) * (m + 1), 0);
        for (std::uint32_t e = 0; e < m; ++e) {
            probes.block(kBlockBuildRow);
            const Matrix& f = keys.central[e];
            std::uint32_t the_const = 0;
            // vinegar x vinegar part -> constant
            for (std::uint32_t r = 0; r < params.v1; ++r) {
                if (vinegar[r] == 0) continue;
                std::uint32_t row_acc = 0;
                for (std::uint32_t c = r; c < params.v1; ++c) {
                    row_acc += static_cast<std::uint32_t>(f.at(r, c)) * vinegar[c];
                }
                the_const += (row_acc % q) * vinegar[r];
            }
            // vinegar x oil part -> linear coefficients
            for (std::uint32_t o = 0; o < m; ++o) {
                std::uint32_t coeff = 0;
                for (std::uint32_t r = 0; r < params.v1; ++r) {
                    coeff += static_cast<std::uint32_t>(f.at(r, params.v1 + o)) * vinegar[r];
                }
                system.at(e, o) = static_cast<std::uint8_t>(coeff % q);
            }
            system.at(e, m) = static_cast<std::uint8_t>(
                (digest[e] + q - static_cast<std::uint8_t>(the_const % q)) % q);
            probes.memory(kAddrSystem + e * (m + 1), m + 1);
        }

        // Gaussian elimination with partial pivoting; every row operation
        // probes the touched row.
        bool singular = false;
        for (std::uint32_t col = 0; col < m && !singular; ++col) {
            std::uint32_t pivot = col;
            while (pivot < m && system.at(pivot, col) == 0) {
                probes.branch(kSitePivotSearch, true);
                ++pivot;
            }
            probes.branch(kSitePivotSearch, false);
            if (pivot == m) {
                singular = true;
                break;
            }
            if (pivot != col) {
                ++st.pivot_swaps;
                for (std::uint32_t c = 0; c <= m; ++c) {
                    std::swap(system.at(pivot, c), system.at(col, c));
                }
                probes.memory(kAddrSystem + pivot * (m + 1), m + 1);
                probes.memory(kAddrSystem + col * (m + 1), m + 1);
            }
            const std::uint8_t inv = inv_mod(system.at(col, col), q);
            for (std::uint32_t c = col; c <= m; ++c) {
                system.at(col, c) = mul_mod(system.at(col, c), inv, q);
            }
            probes.memory(kAddrSystem + col * (m + 1), m + 1);
            for (std::uint32_t row = col + 1; row < m; ++row) {
                const std::uint8_t factor = system.at(row, col);
                probes.branch(kSiteRowLoop, factor != 0);
                if (factor == 0) continue;
                probes.block(kBlockEliminate);
                for (std::uint32_t c = col; c <= m; ++c) {
                    const std::uint32_t sub = static_cast<std::uint32_t>(factor) * system.at(col, c);
                    system.at(row, c) = static_cast<std::uint8_t>(
                        (system.at(row, c) + q * q - sub) % q);
                }
                ++st.row_ops;
                probes.memory(kAddrSystem + row * (m + 1), m + 1);
            }
            probes.checkpoint(kCpPivotColumn);
        }

        // One checkpoint per attempt, at the point the attempt's outcome is
        // decided, so the row spans the vinegar draw and the elimination.
        probes.branch(kSiteSingular, singular);
        probes.checkpoint(kCpAttempt);
        if (singular) {
            probes.branch(kSiteAttemptLoop, true);
            continue;
        }

        // Back substitution.
        probes.block(kBlockBackSub);
        std::vector<std::uint8_t> oil(m, 0);
        for (std::int32_t row = static_cast<std::int32_t>(m) - 1; row >= 0; --row) {
            std::uint32_t acc = system.at(row, m);
            for (std::uint32_t c = row + 1; c < m; ++c) {
                acc += q * q - static_cast<std::uint32_t>(system.at(row, c)) * oil[c];
            }
            oil[row] = static_cast<std::uint8_t>(acc % q);
            probes.memory(kAddrSolution + row, 1);
        }
        probes.checkpoint(kCpSolved);
        probes.block(kBlockAttemptBucket + std::min<std::uint32_t>(st.attempts - 1, 3));
        probes.block(kBlockSwapBucket + std::min<std::uint32_t>(st.pivot_swaps, 5));

        // Central solution y = (vinegar || oil); signature x = T^{-1} y.
        std::vector<std::uint8_t> y(n, 0);
        std::copy(vinegar.begin(), vinegar.end(), y.begin());
        std::copy(oil.begin(), oil.end(), y.begin() + params.v1);

        Signature sig;
        sig.x.assign(n, 0);
        probes.checkpoint(kCpPack);
        probes.block(kBlockPack);
        for (std::uint32_t r = 0; r < n; ++r) {
            std::uint32_t acc = 0;
            for (std::uint32_t c = 0; c < n; ++c) {
                acc += static_cast<std::uint32_t>(keys.t_inv.at(r, c)) * y[c];
            }
            sig.x[r] = static_cast<std::uint8_t>(acc % q);
        }
        probes.memory(kAddrSolution, n);
        probes.checkpoint(kCpPack);
        probes.checkpoint(kCpDone);
        probes.branch(kSiteAttemptLoop, false);
        return sig;
    }
    return std::nullopt;
}

bool verify(const KeyPair& keys, std::span<const std::uint8_t> msg, const Signature& sig,
            const PrimitiveSuite& suite) {
    ProbeContext muted = ProbeContext::muted();
    const std::uint32_t m = static_cast<std::uint32_t>(keys.public_forms.size());
    if (m == 0) return false;
    const std::uint32_t n = keys.public_forms[0].rows;
    if (sig.x.size() != n) return false;

    const std::uint32_t q = keys.q;
    const auto digest = message_digest(keys, msg, m, q, suite, muted);
    for (std::uint32_t e = 0; e < m; ++e) {
        if (eval_form(keys.public_forms[e], sig.x, q) != digest[e]) return false;
    }
    return true;
}

}  // namespace csign::uov
