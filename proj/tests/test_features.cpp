#include <doctest.h>

#include <countersign/features.hpp>
#include <countersign/pca.hpp>
#include <countersign/rng.hpp>
#include <countersign/select.hpp>
#include <countersign/stats.hpp>

#include <cmath>

using namespace csign;

namespace {

// O(n^2) tau-b oracle: explicit pair enumeration with integer counts,
// combined with the same final expression as the implementation.
double tau_oracle(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::int64_t concordant_minus_discordant = 0;
    std::uint64_t tx = 0, ty = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0) ++tx;
            if (dy == 0) ++ty;
            if (dx != 0 && dy != 0) {
                concordant_minus_discordant += ((dx > 0) == (dy > 0)) ? 1 : -1;
            }
        }
    }
    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t denom_x = n0 - tx;
    const std::uint64_t denom_y = n0 - ty;
    if (denom_x == 0 || denom_y == 0) return 0.0;
    return static_cast<double>(concordant_minus_discordant) /
           std::sqrt(static_cast<double>(denom_x) * static_cast<double>(denom_y));
}

std::vector<double> random_sequence(Rng& rng, std::size_t n, std::uint32_t value_range) {
    std::vector<double> out(n);
    for (auto& v : out) v = static_cast<double>(rng.bounded(value_range));
    return out;
}

}  // namespace

TEST_CASE("kendall tau: spec examples") {
    CHECK(kendall_tau(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) ==
          doctest::Approx(1.0));
    CHECK(kendall_tau(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) ==
          doctest::Approx(-1.0));
    CHECK(kendall_tau(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}) ==
          doctest::Approx(4.0 / 6.0));
}

TEST_CASE("kendall tau equals the O(n^2) oracle exactly, ties included") {
    Rng rng(0x7a0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.bounded(199);
        // Small value ranges force plenty of ties.
        const std::uint32_t range = 1 + static_cast<std::uint32_t>(rng.bounded(30));
        const auto x = random_sequence(rng, n, range);
        const auto y = random_sequence(rng, n, range);
        const double expected = tau_oracle(x, y);
        const double got = kendall_tau(x, y);
        CHECK(got == expected);  // exact: both paths use integer pair counts
    }
}

TEST_CASE("kendall tau properties: self-correlation and antisymmetry") {
    Rng rng(0x7a1);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.bounded(60);
        // Permutation values: no ties.
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
        for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(i * 7919 % 104729);
        for (std::size_t i = n; i > 1; --i) {
            std::swap(y[i - 1], y[rng.bounded(i)]);
        }
        CHECK(kendall_tau(y, y) == doctest::Approx(1.0));
        std::vector<double> y_neg(n);
        for (std::size_t i = 0; i < n; ++i) y_neg[i] = -y[i];
        CHECK(kendall_tau(x, y_neg) == doctest::Approx(-kendall_tau(x, y)));
    }
}

TEST_CASE("kendall tau rejects bad input") {
    CHECK_THROWS(kendall_tau(std::vector<double>{1, 2}, std::vector<double>{1}));
    CHECK_THROWS(kendall_tau(std::vector<double>{1}, std::vector<double>{1}));
    // All ties on either side -> 0 by convention.
    CHECK(kendall_tau(std::vector<double>{5, 5, 5}, std::vector<double>{1, 2, 3}) == 0.0);
}

TEST_CASE("kurtosis: degenerate, exact and statistical cases") {
    CHECK(kurtosis(std::vector<double>{3, 3, 3, 3}) == 0.0);
    CHECK(kurtosis(std::vector<double>{1, -1, 1, -1}) == doctest::Approx(1.0));

    Rng rng(0xA0);
    std::vector<double> two_level(100000);
    for (auto& v : two_level) v = rng.chance(0.5) ? 1.0 : -1.0;
    CHECK(kurtosis(two_level) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("pca: diagonal covariance picks the dominant axis") {
    // Sample covariance exactly diag(4, 1).
    const double a = std::sqrt(6.0), b = std::sqrt(1.5);
    const std::vector<std::vector<double>> data = {{a, 0}, {-a, 0}, {0, b}, {0, -b}};
    const PcaResult result = pca(data, 2);
    CHECK(result.eigenvalues[0] == doctest::Approx(4.0));
    CHECK(result.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(std::abs(result.components[0][0]) == doctest::Approx(1.0));
    CHECK(result.components[0][1] == doctest::Approx(0.0));
    CHECK(result.components[0][0] > 0);  // sign convention
}

TEST_CASE("pca: rank-1 line y = x") {
    std::vector<std::vector<double>> data;
    for (int i = -3; i <= 3; ++i) {
        data.push_back({static_cast<double>(i), static_cast<double>(i)});
    }
    const PcaResult result = pca(data, 2);
    CHECK(result.components[0][0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(result.components[0][1] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(result.eigenvalues[1] == doctest::Approx(0.0));
}

TEST_CASE("pca: rank-0 matrix yields zero eigenvalues and identity components") {
    const std::vector<std::vector<double>> data = {{2, 2, 2}, {2, 2, 2}, {2, 2, 2}};
    const PcaResult result = pca(data, 3);
    for (double v : result.eigenvalues) CHECK(v == 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(result.components[i][j] == doctest::Approx(i == j ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("pca: orthonormality and covariance reconstruction on random data") {
    Rng rng(0x9ca);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t rows = 4 + rng.bounded(30);
        const std::size_t cols = 2 + rng.bounded(5);
        std::vector<std::vector<double>> data(rows, std::vector<double>(cols));
        for (auto& row : data) {
            for (auto& v : row) v = rng.uniform01() * 10 - 5;
        }
        const PcaResult result = pca(data, cols);

        for (std::size_t a = 0; a < cols; ++a) {
            for (std::size_t b = 0; b < cols; ++b) {
                double dot = 0;
                for (std::size_t i = 0; i < cols; ++i) {
                    dot += result.components[a][i] * result.components[b][i];
                }
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-9);
            }
        }

        const auto cov = covariance_matrix(data);
        double frobenius = 0;
        for (std::size_t i = 0; i < cols; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                double rebuilt = 0;
                for (std::size_t k = 0; k < cols; ++k) {
                    rebuilt += result.eigenvalues[k] * result.components[k][i] *
                               result.components[k][j];
                }
                const double d = rebuilt - cov[i][j];
                frobenius += d * d;
            }
        }
        CHECK(std::sqrt(frobenius) < 1e-6);
    }
}

TEST_CASE("select_counters: single varying counter wins under PCA") {
    Rng rng(0x5e1);
    std::vector<std::array<double, kEventCount>> rows(64);
    for (auto& row : rows) {
        row.fill(100.0);
        row[event_index(EventKind::BR_MSP)] = static_cast<double>(rng.bounded(1000));
    }
    const auto selection = select_counters(rows, SelectionMethod::PCA, 4);
    CHECK(selection.chosen.front() == EventKind::BR_MSP);
}

TEST_CASE("select_counters: all-constant data falls back to ordinal order") {
    std::vector<std::array<double, kEventCount>> rows(16);
    for (auto& row : rows) row.fill(7.0);
    const auto selection = select_counters(rows, SelectionMethod::MAX_VAR, 3);
    REQUIRE(selection.chosen.size() == 3);
    CHECK(selection.chosen[0] == EventKind::CYCLES);
    CHECK(selection.chosen[1] == EventKind::L2_TCM);
    CHECK(selection.chosen[2] == EventKind::BR_MSP);
    for (double s : selection.scores) CHECK(s == 0.0);
}

TEST_CASE("select_counters: Fisher score on a constructed two-class gap") {
    // Counter L1_DCA: class means 10 apart, population variance 1 per class.
    std::vector<std::array<double, kEventCount>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 8; ++i) {
        std::array<double, kEventCount> row{};
        row.fill(5.0);
        row[event_index(EventKind::L1_DCA)] = (i % 2 == 0) ? 19.0 : 21.0;  // class +: mean 20
        rows.push_back(row);
        labels.push_back(+1);
    }
    for (int i = 0; i < 8; ++i) {
        std::array<double, kEventCount> row{};
        row.fill(5.0);
        row[event_index(EventKind::L1_DCA)] = (i % 2 == 0) ? 9.0 : 11.0;  // class -: mean 10
        rows.push_back(row);
        labels.push_back(-1);
    }
    const auto selection = select_counters(rows, SelectionMethod::FISHER, 1, &labels);
    CHECK(selection.chosen.front() == EventKind::L1_DCA);
    CHECK(selection.scores[event_index(EventKind::L1_DCA)] == doctest::Approx(50.0));

    const std::vector<int> one_class(rows.size(), +1);
    CHECK_THROWS(select_counters(rows, SelectionMethod::FISHER, 1, &one_class));
}

TEST_CASE("select_counters is permutation-equivariant") {
    Rng rng(0xabc);
    std::vector<std::array<double, kEventCount>> rows(40);
    for (auto& row : rows) {
        for (auto& v : row) v = rng.uniform01() * 50;
    }
    const auto base = select_counters(rows, SelectionMethod::MAX_VAR, 4);

    // Swap two counter columns and check the selection maps through.
    std::array<std::size_t, kEventCount> perm = {0, 1, 2, 3, 4, 5, 6, 7};
    std::swap(perm[1], perm[6]);
    std::vector<std::array<double, kEventCount>> permuted(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < kEventCount; ++c) permuted[r][perm[c]] = rows[r][c];
    }
    const auto mapped = select_counters(permuted, SelectionMethod::MAX_VAR, 4);
    REQUIRE(mapped.chosen.size() == base.chosen.size());
    for (std::size_t i = 0; i < base.chosen.size(); ++i) {
        CHECK(event_index(mapped.chosen[i]) == perm[event_index(base.chosen[i])]);
    }
}

namespace {

TimeSeriesSignature constant_signature(std::size_t n, std::uint64_t value) {
    TimeSeriesSignature sig;
    sig.t_s = 100;
    sig.t_m = (n - 1) * 100;
    sig.rows.assign(n, {});
    for (auto& row : sig.rows) row.fill(value);
    return sig;
}

CounterSelection first_z(std::size_t z) {
    CounterSelection sel;
    for (std::size_t i = 0; i < z; ++i) sel.chosen.push_back(static_cast<EventKind>(i));
    return sel;
}

}  // namespace

TEST_CASE("ts_features: window count and clamping") {
    // 10001 samples, shift 100 -> 101 windows before clamping; the tail
    // windows shorter than 2 samples are dropped.
    const auto sig = constant_signature(10001, 5);
    const auto features = ts_features(sig, 1000, 100, first_z(2));
    CHECK(features.rows.size() + features.dropped_windows == 10001 / 100 + 1);
    CHECK(features.rows[0].size() == 2 * 4);
}

TEST_CASE("ts_features: constant column gives (c, 0, 0, c)") {
    const auto sig = constant_signature(500, 9);
    const auto features = ts_features(sig, 100, 50, first_z(1));
    for (const auto& row : features.rows) {
        CHECK(row[0] == doctest::Approx(9.0));   // mean
        CHECK(row[1] == 0.0);                    // kurtosis (degenerate)
        CHECK(row[2] == 0.0);                    // tau vs index (all ties)
        CHECK(row[3] == doctest::Approx(9.0));   // max
    }
}

TEST_CASE("pc_features: shape and ordering") {
    CheckpointSignature sig;
    for (std::uint32_t seed = 0; seed < 2; ++seed) {
        for (std::uint32_t cp = 10; cp < 13; ++cp) {
            CheckpointRow row;
            row.seed_id = seed;
            row.checkpoint_id = cp;
            row.hit_idx = 0;
            for (std::size_t e = 0; e < kEventCount; ++e) {
                row.delta[e] = 100 * seed + cp + e;
            }
            sig.rows.push_back(row);
        }
    }
    const auto z4 = pc_features(sig, first_z(4));
    CHECK(z4.rows.size() == 6);
    CHECK(z4.rows[0].size() == 4);
    REQUIRE(z4.keys.size() == 6);
    CHECK(z4.keys[0].checkpoint_id == 10);

    const auto z8 = pc_features(sig, first_z(8));
    CHECK(z8.rows[0].size() == 8);
    for (std::size_t e = 0; e < kEventCount; ++e) {
        CHECK(z8.column_labels[e] ==
              std::string("pc_") + std::string(kEventNames[e]));
    }
}

TEST_CASE("standardization: z-scores, sigma floor, per-checkpoint groups") {
    FeatureMatrix m;
    m.column_labels = {"a", "b"};
    m.rows = {{0.0, 7.0}, {2.0, 7.0}};
    const auto stats = fit_standardize(m);
    const auto standardized = apply_standardize(m, stats);
    CHECK(standardized.matrix.rows[0][0] == doctest::Approx(-1.0));
    CHECK(standardized.matrix.rows[1][0] == doctest::Approx(1.0));
    // Constant column: sigma floored, zero z-scores.
    CHECK(standardized.matrix.rows[0][1] == doctest::Approx(0.0));
    CHECK(standardized.matrix.rows[1][1] == doctest::Approx(0.0));

    // Applying fitted stats to the fitting data: column means ~ 0.
    double mean0 = (standardized.matrix.rows[0][0] + standardized.matrix.rows[1][0]) / 2;
    CHECK(std::abs(mean0) < 1e-9);
}

TEST_CASE("standardization: unseen checkpoint id sets the novelty flag") {
    FeatureMatrix train;
    train.column_labels = {"x"};
    train.rows = {{1.0}, {2.0}, {5.0}, {6.0}};
    train.keys = {{0, 10, 0}, {1, 10, 0}, {0, 11, 0}, {1, 11, 0}};
    const auto stats = fit_standardize(train);

    FeatureMatrix apply;
    apply.column_labels = {"x"};
    apply.rows = {{1.5}, {9.0}};
    apply.keys = {{2, 10, 0}, {2, 99, 0}};
    const auto out = apply_standardize(apply, stats);
    CHECK_FALSE(out.novelty[0]);
    CHECK(out.novelty[1]);  // checkpoint 99 never seen at fit time
}
