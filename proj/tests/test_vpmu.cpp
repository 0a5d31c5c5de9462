#include <doctest.h>

#include <countersign/collect.hpp>
#include <countersign/rng.hpp>
#include <countersign/target.hpp>
#include <countersign/vpmu.hpp>

#include <deque>
#include <map>

using namespace csign;

namespace {

// Reference 2-bit saturating predictor: the four-state table, simulated
// directly. Counts mispredictions for one site.
std::uint64_t fsm_oracle(const std::vector<bool>& outcomes) {
    int state = 1;  // weakly-not-taken
    std::uint64_t mispredicts = 0;
    for (bool taken : outcomes) {
        const bool predicted = state >= 2;
        if (predicted != taken) ++mispredicts;
        state = taken ? std::min(3, state + 1) : std::max(0, state - 1);
    }
    return mispredicts;
}

// Reference LRU cache: per-set deque of tags, MRU front.
struct LruOracle {
    std::uint32_t sets, ways, line;
    std::map<std::uint32_t, std::deque<std::uint64_t>> model;

    bool access(std::uint64_t addr) {
        const std::uint64_t line_id = addr / line;
        const std::uint32_t set = static_cast<std::uint32_t>(line_id % sets);
        const std::uint64_t tag = line_id / sets;
        auto& dq = model[set];
        for (auto it = dq.begin(); it != dq.end(); ++it) {
            if (*it == tag) {
                dq.erase(it);
                dq.push_front(tag);
                return true;
            }
        }
        dq.push_front(tag);
        if (dq.size() > ways) dq.pop_back();
        return false;
    }
};

VpmuConfig tiny_config() {
    VpmuConfig cfg;
    cfg.l1i = {16, 2, 64};
    cfg.l1d = {16, 2, 64};
    cfg.l2 = {64, 4, 64};
    return cfg;
}

}  // namespace

TEST_CASE("branch predictor: spec examples") {
    {
        Vpmu vpmu;
        for (int i = 0; i < 3; ++i) vpmu.record_branch(7, true);
        CHECK(vpmu.counters()[EventKind::BR_MSP] == 1);
    }
    {
        Vpmu vpmu;
        for (int i = 0; i < 5; ++i) vpmu.record_branch(7, false);
        CHECK(vpmu.counters()[EventKind::BR_MSP] == 0);
    }
    {
        // From state 1 the alternating trace mispredicts every step:
        // 1->2(mp), 2->1(mp), 1->2(mp), 2->1(mp).
        Vpmu vpmu;
        const bool pattern[] = {true, false, true, false};
        for (bool taken : pattern) vpmu.record_branch(7, taken);
        CHECK(vpmu.counters()[EventKind::BR_MSP] == fsm_oracle({true, false, true, false}));
        CHECK(vpmu.counters()[EventKind::BR_MSP] == 4);
    }
}

TEST_CASE("branch predictor matches the 4-state FSM oracle on random traces") {
    Rng rng(0xb5a11);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t len = 1 + rng.bounded(64);
        std::vector<bool> outcomes(len);
        for (auto&& o : outcomes) o = rng.chance(0.5);

        Vpmu vpmu;
        for (bool taken : outcomes) vpmu.record_branch(42, taken);
        CHECK(vpmu.counters()[EventKind::BR_MSP] == fsm_oracle(outcomes));
    }
}

TEST_CASE("cache counters: spec examples") {
    {
        Vpmu vpmu(tiny_config());
        for (std::uint64_t addr : {0ull, 64ull, 0ull}) vpmu.record_access(addr, false);
        CHECK(vpmu.counters()[EventKind::L1_DCA] == 3);
        CHECK(vpmu.counters()[EventKind::L1_DCM] == 2);
    }
    {
        Vpmu vpmu(tiny_config());
        for (int i = 0; i < 100; ++i) vpmu.record_access(0x1234, false);
        CHECK(vpmu.counters()[EventKind::L1_DCM] == 1);
        CHECK(vpmu.counters()[EventKind::L1_DCA] == 100);
    }
}

TEST_CASE("streaming twice the L1 capacity thrashes LRU") {
    const VpmuConfig cfg = tiny_config();
    const std::uint64_t capacity = cfg.l1d.capacity_bytes();
    Vpmu vpmu(cfg);
    const std::uint64_t lines = 2 * capacity / 64;
    for (std::uint64_t i = 0; i < lines; ++i) vpmu.record_access(i * 64, false);
    CHECK(vpmu.counters()[EventKind::L1_DCM] == lines);  // first pass: all cold

    const std::uint64_t misses_before = vpmu.counters()[EventKind::L1_DCM];
    for (std::uint64_t i = 0; i < lines; ++i) vpmu.record_access(i * 64, false);
    const std::uint64_t second_pass_misses = vpmu.counters()[EventKind::L1_DCM] - misses_before;
    CHECK(second_pass_misses > 0);  // second pass hit rate < 100%
}

TEST_CASE("cache counters match a reference LRU simulation on random traces") {
    Rng rng(0xcac4e);
    for (int trial = 0; trial < 1000; ++trial) {
        const VpmuConfig cfg = tiny_config();
        Vpmu vpmu(cfg);
        LruOracle l1d{cfg.l1d.sets, cfg.l1d.ways, cfg.l1d.line_bytes, {}};
        LruOracle l1i{cfg.l1i.sets, cfg.l1i.ways, cfg.l1i.line_bytes, {}};
        LruOracle l2{cfg.l2.sets, cfg.l2.ways, cfg.l2.line_bytes, {}};

        std::uint64_t dca = 0, dcm = 0, icm = 0, l2dca = 0, l2dcm = 0, l2tcm = 0;
        const std::size_t len = 1 + rng.bounded(400);
        for (std::size_t i = 0; i < len; ++i) {
            // Small address pool so hits actually happen.
            const std::uint64_t addr = rng.bounded(64) * 64;
            const bool is_instr = rng.chance(0.3);
            vpmu.record_access(addr, is_instr);
            if (is_instr) {
                if (!l1i.access(addr)) {
                    ++icm;
                    if (!l2.access(addr)) ++l2tcm;
                }
            } else {
                ++dca;
                if (!l1d.access(addr)) {
                    ++dcm;
                    ++l2dca;
                    if (!l2.access(addr)) {
                        ++l2dcm;
                        ++l2tcm;
                    }
                }
            }
        }
        const auto& c = vpmu.counters();
        CHECK(c[EventKind::L1_DCA] == dca);
        CHECK(c[EventKind::L1_DCM] == dcm);
        CHECK(c[EventKind::L1_ICM] == icm);
        CHECK(c[EventKind::L2_DCA] == l2dca);
        CHECK(c[EventKind::L2_DCM] == l2dcm);
        CHECK(c[EventKind::L2_TCM] == l2tcm);
    }
}

TEST_CASE("cache containment invariants hold on random mixed traces") {
    Rng rng(0x11);
    Vpmu vpmu(tiny_config());
    for (int i = 0; i < 5000; ++i) {
        vpmu.record_access(rng.bounded(1 << 14), rng.chance(0.4));
        const auto& c = vpmu.counters();
        CHECK(c[EventKind::L1_DCM] <= c[EventKind::L1_DCA]);
        CHECK(c[EventKind::L2_DCA] == c[EventKind::L1_DCM]);
        CHECK(c[EventKind::L2_DCM] <= c[EventKind::L2_DCA]);
    }
}

TEST_CASE("checkpoint log: hit indices and per-id deltas") {
    Vpmu vpmu;
    vpmu.record_access(0, false);
    vpmu.checkpoint(5);
    vpmu.record_access(64, false);
    vpmu.checkpoint(6);
    vpmu.record_access(128, false);
    vpmu.checkpoint(5);

    const auto& log = vpmu.checkpoint_log();
    REQUIRE(log.size() == 3);
    CHECK(log[0].id == 5);
    CHECK(log[0].hit_idx == 0);
    CHECK(log[1].id == 6);
    CHECK(log[1].hit_idx == 0);
    CHECK(log[2].id == 5);
    CHECK(log[2].hit_idx == 1);
    // Second hit of id 5 covers everything since its first hit.
    CHECK(log[2].delta[EventKind::L1_DCA] == 2);
    // First hit of id 6 covers the whole run so far.
    CHECK(log[1].delta[EventKind::L1_DCA] == 2);
}

TEST_CASE("two identical runs produce identical checkpoint logs") {
    auto run = [] {
        Vpmu vpmu(tiny_config());
        Rng rng(77);
        for (int i = 0; i < 200; ++i) {
            vpmu.record_access(rng.bounded(4096), rng.chance(0.2));
            vpmu.record_branch(static_cast<std::uint32_t>(rng.bounded(8)), rng.chance(0.5));
            if (i % 50 == 0) vpmu.checkpoint(static_cast<std::uint32_t>(i / 50));
        }
        return vpmu.checkpoint_log();
    };
    const auto a = run();
    const auto b = run();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].delta == b[i].delta);
    }
}

TEST_CASE("time-series shape: N = floor(t_m/t_s) + 1 over a parameter sweep") {
    auto target = make_target(SchemeId::LATTICE, SubversionVariant::TRUSTED);
    const std::vector<std::uint8_t> input(40, 0xab);
    const VpmuConfig cfg;

    struct Case {
        std::uint64_t t_m, t_s;
    };
    for (const Case c : {Case{100000, 1000}, Case{5000, 5000}, Case{99999, 1000},
                         Case{12345, 77}, Case{1000, 13}}) {
        const auto result = sample_time_series(*target, input, c.t_m, c.t_s, cfg);
        CHECK(result.signature.rows.size() == c.t_m / c.t_s + 1);
    }
}

TEST_CASE("time-series deltas telescope to the cumulative counters") {
    auto target = make_target(SchemeId::LATTICE, SubversionVariant::TRUSTED);
    const std::vector<std::uint8_t> input(48, 0x11);
    const auto result = sample_time_series(*target, input, 200000, 500, VpmuConfig{});
    REQUIRE(!result.aborted);

    // Re-run without sampling to get the final cumulative counters.
    auto target2 = make_target(SchemeId::LATTICE, SubversionVariant::TRUSTED);
    Vpmu vpmu;
    ProbeContext probes(&vpmu, nullptr);
    for (std::uint64_t call = 0; call < result.sign_calls; ++call) {
        REQUIRE(target2->run_sign(input, probes, call).ok);
    }

    for (std::size_t e = 0; e < kEventCount; ++e) {
        std::uint64_t sum = 0;
        for (const auto& row : result.signature.rows) sum += row[e];
        CHECK(sum == vpmu.counters().counts[e]);
    }
}

TEST_CASE("time-series rows are non-negative and t_m == t_s gives two rows") {
    auto target = make_target(SchemeId::UOV, SubversionVariant::TRUSTED);
    const std::vector<std::uint8_t> input(36, 0x77);
    const auto result = sample_time_series(*target, input, 4000, 4000, VpmuConfig{});
    CHECK(result.signature.rows.size() == 2);
}

TEST_CASE("collect_checkpoints: row counts and determinism") {
    auto target = make_target(SchemeId::HASHTREE, SubversionVariant::TRUSTED);
    std::vector<std::vector<std::uint8_t>> seeds;
    for (int s = 0; s < 2; ++s) {
        seeds.emplace_back(40, static_cast<std::uint8_t>(0x30 + s));
    }
    const auto sig_a = collect_checkpoints(*target, seeds, VpmuConfig{});
    auto target_b = make_target(SchemeId::HASHTREE, SubversionVariant::TRUSTED);
    const auto sig_b = collect_checkpoints(*target_b, seeds, VpmuConfig{});

    REQUIRE(!sig_a.rows.empty());
    REQUIRE(sig_a.rows.size() == sig_b.rows.size());
    for (std::size_t i = 0; i < sig_a.rows.size(); ++i) {
        CHECK(sig_a.rows[i].checkpoint_id == sig_b.rows[i].checkpoint_id);
        CHECK(sig_a.rows[i].delta == sig_b.rows[i].delta);
    }
    // Seed ids tag rows in corpus order.
    CHECK(sig_a.rows.front().seed_id == 0);
    CHECK(sig_a.rows.back().seed_id == 1);
}

TEST_CASE("counters are monotone over a target run") {
    auto target = make_target(SchemeId::LATTICE, SubversionVariant::TRUSTED);
    Vpmu vpmu;
    ProbeContext probes(&vpmu, nullptr);
    CounterVector before = vpmu.counters();
    const std::vector<std::uint8_t> input(64, 0x5c);
    REQUIRE(target->run_sign(input, probes).ok);
    const CounterVector after = vpmu.counters();
    for (std::size_t e = 0; e < kEventCount; ++e) {
        CHECK(after.counts[e] >= before.counts[e]);
    }
    CHECK(after.virtual_cycle > before.virtual_cycle);
}
