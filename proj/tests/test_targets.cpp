#include <doctest.h>

#include <countersign/hashtree.hpp>
#include <countersign/lattice.hpp>
#include <countersign/params.hpp>
#include <countersign/rng.hpp>
#include <countersign/target.hpp>
#include <countersign/uov.hpp>

using namespace csign;

namespace {

std::vector<std::uint8_t> random_input(Rng& rng, std::size_t len) {
    std::vector<std::uint8_t> out(len);
    for (auto& b : out) b = rng.byte();
    return out;
}

std::array<std::uint8_t, 32> seed_from(Rng& rng) {
    std::array<std::uint8_t, 32> seed;
    for (auto& b : seed) b = rng.byte();
    return seed;
}

}  // namespace

TEST_CASE("apply_subversion: parameter table") {
    CHECK(apply_subversion(SchemeId::LATTICE, SubversionVariant::SPARAM).params.lattice.beta == 0);
    const auto trusted = apply_subversion(SchemeId::LATTICE, SubversionVariant::TRUSTED);
    CHECK(trusted.params.lattice.beta == LatticeParams{}.beta);
    CHECK_FALSE(trusted.primitives.weak_prng);
    CHECK_FALSE(trusted.primitives.weak_hash);

    const auto ht = apply_subversion(SchemeId::HASHTREE, SubversionVariant::SPARAM).params.hashtree;
    CHECK(ht.h == 3);
    CHECK(ht.k == 2);
    CHECK(ht.t == 2);

    const auto uv = apply_subversion(SchemeId::UOV, SubversionVariant::SPARAM).params.uov;
    CHECK(uv.o1 == 4);
    CHECK(uv.o2 == 4);

    const auto hash_variant = apply_subversion(SchemeId::HASHTREE, SubversionVariant::HASH);
    CHECK(hash_variant.primitives.weak_hash);
    CHECK_FALSE(hash_variant.primitives.weak_prng);
    CHECK(hash_variant.params.hashtree.h == HashTreeParams{}.h);
}

TEST_CASE("weak hash output is the 4-byte digest repeated") {
    ProbeContext muted = ProbeContext::muted();
    const std::vector<std::uint8_t> data = {1, 2, 3, 4, 5, 6, 7};
    for (std::size_t len : {1u, 4u, 6u, 9u, 32u, 51u}) {
        const auto out = weak_hash(data, len, muted);
        REQUIRE(out.size() == len);
        const auto base = weak_hash(data, 4, muted);
        for (std::size_t i = 0; i < len; ++i) {
            CHECK(out[i] == base[i % 4]);
        }
    }
}

TEST_CASE("strong and weak primitives return equal-length outputs") {
    ProbeContext muted = ProbeContext::muted();
    const std::vector<std::uint8_t> seed = {9, 9, 9};
    for (std::size_t len : {1u, 16u, 33u, 100u}) {
        CHECK(strong_hash(seed, len, muted).size() == len);
        CHECK(weak_hash(seed, len, muted).size() == len);
        std::vector<std::uint8_t> a(len), b(len);
        StrongPrng(seed).fill(a, muted);
        WeakPrng(seed).fill(b, muted);
        CHECK(a.size() == b.size());
    }
}

TEST_CASE("lattice: sign/verify round-trip accepts and tampering rejects") {
    Rng rng(0x1a77);
    const LatticeParams params;
    const PrimitiveSuite suite;
    ProbeContext muted = ProbeContext::muted();
    const auto seed = seed_from(rng);
    const auto keys = lattice::keygen(seed, params, suite, muted);
    const auto msg = random_input(rng, 33);

    auto sig = lattice::sign(keys, msg, params, suite, muted);
    REQUIRE(sig.has_value());
    CHECK(lattice::verify(keys, msg, *sig, params, suite));

    // Flip one byte of the challenge digest -> reject.
    auto tampered = *sig;
    tampered.c_digest[0] ^= 0xff;
    CHECK_FALSE(lattice::verify(keys, msg, tampered, params, suite));

    // Malformed signature -> reject, not crash.
    auto truncated = *sig;
    truncated.z.pop_back();
    CHECK_FALSE(lattice::verify(keys, msg, truncated, params, suite));
}

TEST_CASE("lattice: trusted rejection loop iterates more than once on average") {
    Rng rng(0xfeed);
    const LatticeParams params;
    const PrimitiveSuite suite;
    ProbeContext muted = ProbeContext::muted();
    const auto keys = lattice::keygen(seed_from(rng), params, suite, muted);

    std::uint64_t total_iters = 0;
    const int runs = 100;
    for (int i = 0; i < runs; ++i) {
        const auto msg = random_input(rng, 24);
        lattice::SignStats stats;
        const auto sig = lattice::sign(keys, msg, params, suite, muted, 0, &stats);
        REQUIRE(sig.has_value());
        total_iters += stats.iterations;
    }
    CHECK(total_iters > static_cast<std::uint64_t>(runs));
    MESSAGE("mean iterations: ", static_cast<double>(total_iters) / runs);
}

TEST_CASE("lattice: SPARAM (beta=0) accepts on the first iteration, always") {
    Rng rng(0x5b);
    const auto config = apply_subversion(SchemeId::LATTICE, SubversionVariant::SPARAM);
    const LatticeParams& params = config.params.lattice;
    ProbeContext muted = ProbeContext::muted();
    const auto keys = lattice::keygen(seed_from(rng), params, config.primitives, muted);

    // Parameter arithmetic: max attainable ||Z||_inf = y_bound + tau*eta < gamma1.
    CHECK(params.y_bound + params.tau * params.eta < params.gamma1);

    for (int i = 0; i < 100; ++i) {
        const auto msg = random_input(rng, 16 + rng.bounded(64));
        lattice::SignStats stats;
        const auto sig = lattice::sign(keys, msg, params, config.primitives, muted, 0, &stats);
        REQUIRE(sig.has_value());
        CHECK(stats.iterations == 1);
    }
}

TEST_CASE("lattice: SPARAM signatures still pass the honest verifier") {
    Rng rng(0xeb0);
    const auto config = apply_subversion(SchemeId::LATTICE, SubversionVariant::SPARAM);
    ProbeContext muted = ProbeContext::muted();
    const auto keys = lattice::keygen(seed_from(rng), config.params.lattice, config.primitives, muted);
    const LatticeParams original;  // honest verifier uses unsubverted bounds
    for (int i = 0; i < 50; ++i) {
        const auto msg = random_input(rng, 20);
        const auto sig = lattice::sign(keys, msg, config.params.lattice, config.primitives, muted);
        REQUIRE(sig.has_value());
        CHECK(lattice::verify(keys, msg, *sig, original, config.primitives));
    }
}

TEST_CASE("lattice: hint weight stays under omega and corrections verify") {
    Rng rng(0x31337);
    const LatticeParams params;
    const PrimitiveSuite suite;
    ProbeContext muted = ProbeContext::muted();
    const auto keys = lattice::keygen(seed_from(rng), params, suite, muted);
    for (int i = 0; i < 20; ++i) {
        const auto msg = random_input(rng, 10);
        lattice::SignStats stats;
        const auto sig = lattice::sign(keys, msg, params, suite, muted, 0, &stats);
        REQUIRE(sig.has_value());
        CHECK(stats.hint_weight <= params.omega);
        CHECK(stats.hint_weight == sig->hints.size());
        CHECK(lattice::verify(keys, msg, *sig, params, suite));
    }
}

TEST_CASE("hashtree: path node counts follow k*log2(t) + h") {
    Rng rng(0x7733);
    ProbeContext muted = ProbeContext::muted();
    {
        const HashTreeParams params;  // trusted toy: h=8, k=4, t=64
        const PrimitiveSuite suite;
        const auto keys = hashtree::keygen(seed_from(rng), params, suite, muted);
        hashtree::SignStats stats;
        const auto msg = random_input(rng, 21);
        hashtree::sign(keys, msg, params, suite, muted, 0, &stats);
        CHECK(stats.path_nodes == 4 * 6 + 8);  // 32
    }
    {
        const auto config = apply_subversion(SchemeId::HASHTREE, SubversionVariant::SPARAM);
        const auto keys = hashtree::keygen(seed_from(rng), config.params.hashtree,
                                           config.primitives, muted);
        hashtree::SignStats stats;
        const auto msg = random_input(rng, 21);
        hashtree::sign(keys, msg, config.params.hashtree, config.primitives, muted, 0, &stats);
        CHECK(stats.path_nodes == 2 * 1 + 3);  // 5
    }
}

TEST_CASE("hashtree: round-trip verify accepts, wrong message rejects") {
    Rng rng(0x60d);
    const HashTreeParams params;
    const PrimitiveSuite suite;
    ProbeContext muted = ProbeContext::muted();
    const auto keys = hashtree::keygen(seed_from(rng), params, suite, muted);
    const auto msg = random_input(rng, 50);
    const auto sig = hashtree::sign(keys, msg, params, suite, muted);
    CHECK(hashtree::verify(keys, msg, sig, suite));

    auto other = msg;
    other[0] ^= 1;
    CHECK_FALSE(hashtree::verify(keys, other, sig, suite));
}

TEST_CASE("hashtree: weak-hash build still verifies") {
    Rng rng(0xdead);
    const auto config = apply_subversion(SchemeId::HASHTREE, SubversionVariant::HASH);
    ProbeContext muted = ProbeContext::muted();
    const auto keys = hashtree::keygen(seed_from(rng), config.params.hashtree,
                                       config.primitives, muted);
    CHECK(config.params.hashtree.h == HashTreeParams{}.h);  // params untouched
    const auto msg = random_input(rng, 12);
    const auto sig = hashtree::sign(keys, msg, config.params.hashtree, config.primitives, muted);
    CHECK(hashtree::verify(keys, msg, sig, config.primitives));
}

TEST_CASE("uov: solution satisfies all public equations") {
    Rng rng(0x1101);
    const UovParams params;
    const PrimitiveSuite suite;
    ProbeContext muted = ProbeContext::muted();
    const auto keys = uov::keygen(seed_from(rng), params, suite, muted);
    for (int i = 0; i < 10; ++i) {
        const auto msg = random_input(rng, 18);
        const auto sig = uov::sign(keys, msg, params, suite, muted);
        REQUIRE(sig.has_value());
        CHECK(uov::verify(keys, msg, *sig, suite));
        auto other = msg;
        other[0] ^= 0x40;
        CHECK_FALSE(uov::verify(keys, other, *sig, suite));
    }
}

TEST_CASE("uov: SPARAM build does strictly less elimination work") {
    Rng rng(0xa0a0);
    ProbeContext muted = ProbeContext::muted();
    const auto trusted_cfg = apply_subversion(SchemeId::UOV, SubversionVariant::TRUSTED);
    const auto sparam_cfg = apply_subversion(SchemeId::UOV, SubversionVariant::SPARAM);
    const auto seed = seed_from(rng);
    const auto msg = random_input(rng, 30);

    const auto trusted_keys = uov::keygen(seed, trusted_cfg.params.uov, trusted_cfg.primitives, muted);
    const auto sparam_keys = uov::keygen(seed, sparam_cfg.params.uov, sparam_cfg.primitives, muted);

    uov::SignStats trusted_stats, sparam_stats;
    REQUIRE(uov::sign(trusted_keys, msg, trusted_cfg.params.uov, trusted_cfg.primitives, muted,
                      0, &trusted_stats).has_value());
    REQUIRE(uov::sign(sparam_keys, msg, sparam_cfg.params.uov, sparam_cfg.primitives, muted,
                      0, &sparam_stats).has_value());
    CHECK(sparam_stats.row_ops < trusted_stats.row_ops);
}

TEST_CASE("uov: a singular first attempt retries with a second checkpoint hit") {
    // Seed search: find an input whose first vinegar draw yields a singular
    // system, then check the attempt counter.
    Rng rng(0x5ee);
    const UovParams params;
    const PrimitiveSuite suite;
    ProbeContext muted = ProbeContext::muted();
    const auto keys = uov::keygen(seed_from(rng), params, suite, muted);

    bool found = false;
    for (int i = 0; i < 3000 && !found; ++i) {
        const auto msg = random_input(rng, 8);
        uov::SignStats stats;
        const auto sig = uov::sign(keys, msg, params, suite, muted, 0, &stats);
        REQUIRE(sig.has_value());
        if (stats.attempts >= 2) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("drop-in substitution: every scheme x variant round-trips") {
    Rng rng(0x90);
    for (SchemeId scheme : {SchemeId::LATTICE, SchemeId::HASHTREE, SchemeId::UOV}) {
        for (SubversionVariant variant :
             {SubversionVariant::TRUSTED, SubversionVariant::PRNG, SubversionVariant::HASH,
              SubversionVariant::SPARAM}) {
            auto target = make_target(scheme, variant);
            for (int i = 0; i < 5; ++i) {
                const auto input = random_input(rng, 33 + rng.bounded(64));
                const auto outcome = target->run_roundtrip(input);
                CHECK_MESSAGE(outcome.ok, to_string(scheme), "/", to_string(variant), ": ",
                              outcome.error);
            }
        }
    }
}

TEST_CASE("lattice: lowering beta never increases the iteration count") {
    Rng rng(0x777);
    ProbeContext muted = ProbeContext::muted();
    const PrimitiveSuite suite;
    LatticeParams trusted;  // beta = 4
    LatticeParams lowered = trusted;
    lowered.beta = 2;
    const auto seed = seed_from(rng);
    const auto keys = lattice::keygen(seed, trusted, suite, muted);

    std::uint64_t trusted_total = 0, lowered_total = 0;
    for (int i = 0; i < 60; ++i) {
        const auto msg = random_input(rng, 16);
        lattice::SignStats a, b;
        REQUIRE(lattice::sign(keys, msg, trusted, suite, muted, 0, &a).has_value());
        REQUIRE(lattice::sign(keys, msg, lowered, suite, muted, 0, &b).has_value());
        trusted_total += a.iterations;
        lowered_total += b.iterations;
        CHECK(b.iterations <= a.iterations);
    }
    CHECK(lowered_total <= trusted_total);
}
