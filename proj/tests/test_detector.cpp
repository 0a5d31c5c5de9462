#include <doctest.h>

#include <countersign/aggregate.hpp>
#include <countersign/crossval.hpp>
#include <countersign/ensemble.hpp>
#include <countersign/ocsvm.hpp>
#include <countersign/rng.hpp>

#include <cmath>

using namespace csign;

namespace {

// Box-Muller from the deterministic Rng.
double gaussian(Rng& rng) {
    const double u1 = rng.uniform01() + 1e-12;
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

FeatureMatrix gaussian_cluster(Rng& rng, std::size_t rows, std::size_t dims,
                               double center = 0.0) {
    FeatureMatrix m;
    for (std::size_t c = 0; c < dims; ++c) m.column_labels.push_back("f" + std::to_string(c));
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> row(dims);
        for (auto& v : row) v = center + gaussian(rng);
        m.rows.push_back(std::move(row));
    }
    return m;
}

double training_outlier_fraction(const OneClassSvmModel& model, const FeatureMatrix& train) {
    const SvmPrediction p = predict(model, train);
    std::size_t negative = 0;
    for (int label : p.labels) negative += (label < 0);
    return static_cast<double>(negative) / static_cast<double>(p.labels.size());
}

}  // namespace

TEST_CASE("ocsvm: nu-property and KKT residual on Gaussian training sets") {
    Rng rng(0x0c5);
    for (double nu : {0.1, 0.2, 0.4}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto train = gaussian_cluster(rng, 200, 3);
            const auto model = train_ocsvm(train, 0.5, nu);
            CHECK(model.kkt_residual <= 1e-6);
            CHECK(training_outlier_fraction(model, train) <= nu + 0.05);

            double alpha_sum = 0;
            const double box = 1.0 / (nu * 200.0);
            for (double a : model.alphas) {
                CHECK(a >= 0.0);
                CHECK(a <= box + 1e-15);
                alpha_sum += a;
            }
            CHECK(std::abs(alpha_sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("ocsvm: identical training rows all sit on the trusted boundary") {
    FeatureMatrix train;
    train.column_labels = {"a", "b"};
    for (int i = 0; i < 20; ++i) train.rows.push_back({4.0, 4.0});
    const auto model = train_ocsvm(train, 0.01, 0.2);
    const SvmPrediction p = predict(model, train);
    for (std::size_t i = 1; i < p.decisions.size(); ++i) {
        CHECK(p.decisions[i] == doctest::Approx(p.decisions[0]));
    }
    // decision exactly 0 labels +1: the boundary is trusted.
    for (int label : p.labels) CHECK(label == +1);
}

TEST_CASE("ocsvm: far outliers are labeled -1, training data mostly +1") {
    Rng rng(0x0c6);
    const auto train = gaussian_cluster(rng, 150, 2);
    const auto model = train_ocsvm(train, 0.5, 0.1);

    FeatureMatrix probe;
    probe.column_labels = train.column_labels;
    probe.rows.push_back({50.0, -40.0});
    const SvmPrediction p = predict(model, probe);
    CHECK(p.labels[0] == -1);
    CHECK(p.decisions[0] < 0.0);

    const double inlier_rate = 1.0 - training_outlier_fraction(model, train);
    CHECK(inlier_rate >= 1.0 - 0.1 - 0.05);
}

TEST_CASE("ocsvm: decision function is row-permutation invariant") {
    Rng rng(0x0c7);
    const auto train = gaussian_cluster(rng, 120, 2);
    FeatureMatrix shuffled = train;
    Rng perm_rng(0x123);
    for (std::size_t i = shuffled.rows.size(); i > 1; --i) {
        std::swap(shuffled.rows[i - 1], shuffled.rows[perm_rng.bounded(i)]);
    }
    const auto model_a = train_ocsvm(train, 0.5, 0.2);
    const auto model_b = train_ocsvm(shuffled, 0.5, 0.2);

    const auto probe = gaussian_cluster(rng, 40, 2);
    const auto pa = predict(model_a, probe);
    const auto pb = predict(model_b, probe);
    for (std::size_t i = 0; i < probe.rows.size(); ++i) {
        CHECK(std::abs(pa.decisions[i] - pb.decisions[i]) <= 1e-9);
    }
}

TEST_CASE("ocsvm: parameter validation") {
    FeatureMatrix tiny;
    tiny.column_labels = {"a"};
    for (int i = 0; i < 5; ++i) tiny.rows.push_back({1.0 * i});
    CHECK_THROWS(train_ocsvm(tiny, 0.5, 0.1));  // < 10 rows

    Rng rng(1);
    const auto train = gaussian_cluster(rng, 20, 2);
    CHECK_THROWS(train_ocsvm(train, -1.0, 0.1));
    CHECK_THROWS(train_ocsvm(train, 0.5, 0.0));
    CHECK_THROWS(train_ocsvm(train, 0.5, 1.5));

    const auto model = train_ocsvm(train, 0.5, 0.2);
    FeatureMatrix wrong;
    wrong.column_labels = {"a", "b", "c"};
    wrong.rows.push_back({1, 2, 3});
    CHECK_THROWS(predict(model, wrong));
}

TEST_CASE("ensemble: unanimity-to-trust voting") {
    Rng rng(0xe5b);
    // 8-column features; the second half shifts for the outlier probe so
    // only member 2 flags it.
    FeatureMatrix train;
    for (std::size_t c = 0; c < kEventCount; ++c) {
        train.column_labels.push_back("c" + std::to_string(c));
    }
    for (int r = 0; r < 120; ++r) {
        std::vector<double> row(kEventCount);
        for (auto& v : row) v = gaussian(rng);
        train.rows.push_back(std::move(row));
    }
    // Gamma sized for 4-dimensional members: 0.5 would shrink the learned
    // region to islands around single points.
    const auto ensemble = train_ensemble(train, 0.05, 0.1);
    REQUIRE(ensemble.members.size() == 2);

    FeatureMatrix probe;
    probe.column_labels = train.column_labels;
    probe.rows.push_back({0, 0, 0, 0, 0, 0, 0, 0});          // both members agree: trusted
    probe.rows.push_back({0, 0, 0, 0, 40, 40, 40, 40});      // member 2 objects
    const auto p = predict(ensemble, probe);
    CHECK(p.labels[0] == +1);
    CHECK(p.labels[1] == -1);

    // Union bound on the trusted training data.
    const auto self = predict(ensemble, train);
    std::size_t negative = 0;
    for (int label : self.labels) negative += (label < 0);
    CHECK(static_cast<double>(negative) / static_cast<double>(self.labels.size()) <=
          2 * 0.1 + 0.05);
}

TEST_CASE("ensemble requires all eight counters") {
    FeatureMatrix narrow;
    narrow.column_labels = {"a", "b"};
    for (int i = 0; i < 20; ++i) narrow.rows.push_back({0.0, 1.0});
    CHECK_THROWS(train_ensemble(narrow, 0.5, 0.1));
}

TEST_CASE("aggregate_majority: spec examples") {
    const std::vector<int> labels = {+1, +1, -1, +1, -1, -1, +1, +1, -1};
    CHECK(aggregate_majority(labels, 3) == std::vector<int>{+1, -1, +1});
    CHECK(aggregate_majority(labels, 1) == labels);
    CHECK_THROWS(aggregate_majority(labels, 2));   // even t
    CHECK_THROWS(aggregate_majority({+1}, 3));     // fewer labels than t
}

TEST_CASE("aggregate_majority matches exhaustive enumeration, lengths <= 12") {
    for (std::uint32_t t : {1u, 3u, 5u}) {
        for (std::size_t len = t; len <= 12; ++len) {
            for (std::uint64_t mask = 0; mask < (1ull << len); ++mask) {
                std::vector<int> labels(len);
                for (std::size_t i = 0; i < len; ++i) {
                    labels[i] = (mask >> i) & 1 ? +1 : -1;
                }
                const auto got = aggregate_majority(labels, t);
                // Oracle: direct subset sums.
                const std::size_t subsets = len / t;
                REQUIRE(got.size() == subsets);
                for (std::size_t s = 0; s < subsets; ++s) {
                    int sum = 0;
                    for (std::size_t i = s * t; i < (s + 1) * t; ++i) sum += labels[i];
                    CHECK(got[s] == (sum > 0 ? +1 : -1));
                }
            }
        }
    }
}

TEST_CASE("aggregation is monotone in label flips") {
    Rng rng(0x3e);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 9;
        std::vector<int> labels(len);
        for (auto& l : labels) l = rng.chance(0.5) ? +1 : -1;
        const auto before = aggregate_majority(labels, 3);
        std::vector<std::size_t> negatives;
        for (std::size_t i = 0; i < len; ++i) {
            if (labels[i] < 0) negatives.push_back(i);
        }
        if (negatives.empty()) continue;
        labels[negatives[rng.bounded(negatives.size())]] = +1;
        const auto after = aggregate_majority(labels, 3);
        for (std::size_t s = 0; s < before.size(); ++s) {
            CHECK(after[s] >= before[s]);
        }
    }
}

TEST_CASE("accuracy: hand counts") {
    CHECK(accuracy({+1, -1, +1}, +1) == doctest::Approx(2.0 / 3.0));
    CHECK(accuracy({+1, +1, +1}, +1) == doctest::Approx(1.0));
    CHECK(accuracy({-1, -1}, +1) == doctest::Approx(0.0));
}

TEST_CASE("make_verdict: fractions and the tie rule") {
    const std::vector<int> labels = {+1, +1, +1, -1, -1, -1};
    const Verdict v = make_verdict(labels, 3, +1);
    CHECK(v.subset_labels.size() == 2);
    CHECK(v.pos_fraction == doctest::Approx(0.5));
    CHECK(v.neg_fraction == doctest::Approx(0.5));
    CHECK(v.subverted);  // ties resolve to subverted
    CHECK(v.accuracy_vs_truth.value() == doctest::Approx(0.5));
}

namespace {

FeatureMatrix pc_matrix_for_seeds(Rng& rng, const std::vector<std::uint32_t>& seeds,
                                  std::size_t rows_per_seed, double scale = 1.0) {
    FeatureMatrix m;
    for (std::size_t c = 0; c < kEventCount; ++c) {
        m.column_labels.push_back("c" + std::to_string(c));
    }
    for (std::uint32_t seed : seeds) {
        for (std::size_t r = 0; r < rows_per_seed; ++r) {
            std::vector<double> row(kEventCount);
            for (auto& v : row) v = scale * gaussian(rng) + 10.0;
            m.rows.push_back(std::move(row));
            m.keys.push_back({seed, static_cast<std::uint32_t>(r % 4 + 10), 0});
        }
    }
    return m;
}

}  // namespace

TEST_CASE("cross_validate_pc: tie goes to fold 0 on identically distributed seeds") {
    Rng rng(0x909);
    // Seeds with literally identical rows: every fold scores the same.
    FeatureMatrix m;
    for (std::size_t c = 0; c < kEventCount; ++c) {
        m.column_labels.push_back("c" + std::to_string(c));
    }
    for (std::uint32_t seed = 0; seed < 3; ++seed) {
        for (std::size_t r = 0; r < 24; ++r) {
            std::vector<double> row(kEventCount, static_cast<double>(r % 6));
            m.rows.push_back(std::move(row));
            m.keys.push_back({seed, static_cast<std::uint32_t>(r % 6 + 10), 0});
        }
    }
    const auto cv = cross_validate_pc(m, 3, 0.1, 0.2);
    CHECK(cv.chosen_fold == 0);
    REQUIRE(cv.folds.size() == 3);
    CHECK(cv.chosen_seeds == cv.folds[0]);
}

TEST_CASE("cross_validate_pc: a corrupted seed's fold scores lowest") {
    Rng rng(0x90a);
    auto m = pc_matrix_for_seeds(rng, {0, 1, 2, 3, 4, 5}, 24);
    // Seed 2 (fold 2, by round-robin over sorted seeds) gets absurd rows.
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        if (m.keys[r].seed_id == 2) {
            for (auto& v : m.rows[r]) v = 1e6;
        }
    }
    const auto cv = cross_validate_pc(m, 3, 0.1, 0.2);
    const std::uint32_t corrupted_fold = 2;  // seed 2 lands in fold 2
    CHECK(cv.fold_scores[corrupted_fold] <= cv.fold_scores[cv.chosen_fold]);
    CHECK(cv.chosen_fold != corrupted_fold);
}

TEST_CASE("cross_validate_pc: fewer than three seeds is an error") {
    Rng rng(0x90b);
    const auto m = pc_matrix_for_seeds(rng, {0, 1}, 24);
    CHECK_THROWS(cross_validate_pc(m, 3, 0.1, 0.2));
}
