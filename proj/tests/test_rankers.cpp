#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "efsis/error.hpp"
#include "efsis/rankers.hpp"
#include "oracles.hpp"

using namespace efsis;

namespace {

std::size_t recovered_in_top(const RankedList& list, std::size_t informative, std::size_t top)
{
    std::size_t hits = 0;
    for (std::size_t f = 0; f < informative; ++f) {
        hits += list.ranks[f] <= top;
    }
    return hits;
}

} // namespace

TEST_SUITE("rankers") {

TEST_CASE("scores_to_ranks examples")
{
    CHECK(scores_to_ranks(std::vector<double>{0.5, 0.9, 0.1}, SortOrder::Descending).ranks
          == std::vector<std::size_t>{2, 1, 3});
    CHECK(scores_to_ranks(std::vector<double>{4, 4, 4, 4}, SortOrder::Descending).ranks
          == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(scores_to_ranks(std::vector<double>{0.5, 0.5, 1.0}, SortOrder::Descending).ranks
          == std::vector<std::size_t>{2, 3, 1});
    CHECK(scores_to_ranks(std::vector<double>{0.5, 0.5, 1.0}, SortOrder::Ascending).ranks
          == std::vector<std::size_t>{1, 2, 3});

    const auto list = scores_to_ranks(std::vector<double>{0.5, 0.9, 0.1}, SortOrder::Descending);
    CHECK(list.order() == std::vector<std::size_t>{1, 0, 2});

    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(scores_to_ranks(std::vector<double>{1.0, nan}, SortOrder::Descending), Error);
    CHECK_THROWS_AS(scores_to_ranks(std::vector<double>{1.0, INFINITY}, SortOrder::Descending), Error);
}

TEST_CASE("scores_to_ranks is invariant under increasing affine maps")
{
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + uniform_index(rng, 40);
        std::vector<double> s(d);
        for (auto& v : s) {
            // coarse values so ties occur
            v = static_cast<double>(uniform_index(rng, 8));
        }
        const double a = 0.25 + 4.0 * uniform_unit(rng);
        const double c = 10.0 * standard_normal(rng);
        std::vector<double> t(d);
        for (std::size_t i = 0; i < d; ++i) {
            t[i] = a * s[i] + c;
        }
        const auto r1 = scores_to_ranks(s, SortOrder::Descending);
        CHECK(is_permutation_ranking(r1.ranks));
        CHECK(r1.ranks == scores_to_ranks(t, SortOrder::Descending).ranks);
    }
}

TEST_CASE("is_permutation_ranking")
{
    CHECK(is_permutation_ranking(std::vector<std::size_t>{3, 1, 2}));
    CHECK_FALSE(is_permutation_ranking(std::vector<std::size_t>{3, 3, 2}));
    CHECK_FALSE(is_permutation_ranking(std::vector<std::size_t>{0, 1, 2}));
    CHECK_FALSE(is_permutation_ranking(std::vector<std::size_t>{1, 2, 4}));
}

TEST_CASE("ranker names")
{
    for (auto r : kAllRankers) {
        CHECK(parse_ranker(ranker_name(r)) == r);
    }
    CHECK(parse_ranker("info_gain") == Ranker::InfoGain);
    CHECK(parse_ranker("RELIEFF") == Ranker::ReliefF);
    CHECK_THROWS_AS(parse_ranker("lasso"), Error);
}

TEST_CASE("SAM hand evaluation on two features")
{
    // Feature 0 shifts by 2, feature 1 has equal class means; both have
    // within-class sum of squares 4, so s = sqrt(0.5 * 4) and s0 = s.
    const LabeledMatrix m(4, 2, {0, 0, 2, 2, 2, 2, 4, 0}, {0, 0, 1, 1});
    const auto d = sam_statistic(m);
    const double s = std::sqrt(2.0);
    CHECK(d[0] == doctest::Approx(2.0 / (s + s)).epsilon(1e-14));
    CHECK(d[1] == 0.0);
    const auto list = rank_sam(m);
    CHECK(list.ranks == std::vector<std::size_t>{1, 2});
    CHECK(list.ranker == Ranker::Sam);
}

TEST_CASE("SAM sign follows the positive class")
{
    const LabeledMatrix m(4, 1, {3, 4, 0, 1}, {0, 0, 1, 1});
    CHECK(sam_statistic(m)[0] < 0.0);
}

TEST_CASE("SAM rejects all-constant data")
{
    const LabeledMatrix m(4, 2, {1, 1, 1, 1, 1, 1, 1, 1}, {0, 0, 1, 1});
    CHECK_THROWS_AS(rank_sam(m), Error);
}

TEST_CASE("SAM ranks a zero-shift feature behind every shifted feature")
{
    Rng rng(6);
    const std::size_t p = 30;
    const std::size_t d = 12;
    std::vector<double> v(p * d);
    std::vector<std::uint8_t> labels(p);
    for (std::size_t r = 0; r < p; ++r) {
        labels[r] = r >= p / 2;
    }
    for (std::size_t r = 0; r < p / 2; ++r) {
        for (std::size_t f = 0; f < d; ++f) {
            const double x = standard_normal(rng);
            v[r * d + f] = x;
            // feature 5 is copied verbatim into the positive class
            v[(r + p / 2) * d + f] = f == 5 ? x : standard_normal(rng) + 0.3 + 0.2 * f;
        }
    }
    const LabeledMatrix m(p, d, v, labels);
    CHECK(rank_sam(m).ranks[5] == d);
}

TEST_CASE("InfoGain: two pure bins on balanced labels give one bit")
{
    const LabeledMatrix m(4, 2, {0, 5, 0, 5, 1, 5, 1, 5}, {0, 0, 1, 1});
    const auto ig = infogain_scores(m);
    CHECK(ig[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ig[1] == 0.0); // constant feature: a single bin
}

TEST_CASE("InfoGain: perfect separation on unbalanced labels gives H(Y)")
{
    const std::vector<std::uint8_t> labels{0, 0, 0, 1, 1, 1, 1, 1};
    const LabeledMatrix m(8, 1, {1, 2, 3, 10, 11, 12, 13, 14}, labels);
    CHECK(infogain_scores(m)[0] == doctest::Approx(oracle::entropy(labels)).epsilon(1e-14));
}

TEST_CASE("InfoGain: equal-frequency bins of two on twenty distinct values")
{
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(20);
        for (auto& v : x) {
            v = standard_normal(rng);
        }
        std::vector<std::uint8_t> y(20);
        for (auto& l : y) {
            l = static_cast<std::uint8_t>(uniform_index(rng, 2));
        }
        y[0] = 0;
        y[1] = 1;
        // sample with sorted position i lands in bin i / 2
        std::vector<std::size_t> idx(20);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
        double h_cond = 0.0;
        for (std::size_t b = 0; b < 10; ++b) {
            h_cond += 0.1 * oracle::entropy({y[idx[2 * b]], y[idx[2 * b + 1]]});
        }
        const LabeledMatrix m(20, 1, x, y);
        CHECK(infogain_scores(m)[0]
              == doctest::Approx(std::max(0.0, oracle::entropy(y) - h_cond)).epsilon(1e-12));
    }
}

TEST_CASE("InfoGain is invariant under strictly increasing per-feature maps")
{
    const std::vector<std::function<double(double)>> maps{
        [](double x) { return std::exp(x); },
        [](double x) { return x * x * x; },
        [](double x) { return std::atan(x); },
        [](double x) { return 3.0 * x - 7.0; },
        [](double x) { return x < 0 ? x : 100.0 * x; },
    };
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = oracle::random_matrix(24 + 2 * uniform_index(rng, 10), 15, rng);
        std::vector<double> v(m.values().begin(), m.values().end());
        for (std::size_t f = 0; f < m.cols(); ++f) {
            const auto& g = maps[uniform_index(rng, maps.size())];
            for (std::size_t r = 0; r < m.rows(); ++r) {
                v[r * m.cols() + f] = g(v[r * m.cols() + f]);
            }
        }
        const LabeledMatrix t(m.rows(), m.cols(), v, {m.labels().begin(), m.labels().end()});
        CHECK(infogain_scores(m) == infogain_scores(t));
        CHECK(rank_infogain(m) == rank_infogain(t));
    }
}

TEST_CASE("GeoDE 2x2: shifted feature dominates and matches the dense solve")
{
    Rng rng(41);
    std::vector<double> v;
    std::vector<std::uint8_t> y;
    for (int r = 0; r < 40; ++r) {
        const bool pos = r >= 20;
        v.push_back(standard_normal(rng) + (pos ? 2.0 : 0.0));
        v.push_back(standard_normal(rng));
        y.push_back(pos);
    }
    const LabeledMatrix m(40, 2, v, y);
    const auto b = geode_direction(m);
    const auto ref = oracle::dense_geode(m, 0.5);
    CHECK(b[0] == doctest::Approx(ref[0]).epsilon(1e-10));
    CHECK(b[1] == doctest::Approx(ref[1]).epsilon(1e-10));
    CHECK(std::abs(b[0]) > std::abs(b[1]));
    CHECK(rank_geode(m).ranks[0] == 1);
}

TEST_CASE("GeoDE: zero mean difference with no correlation gives a zero weight")
{
    // Within-class cross products of the two features cancel across classes.
    const LabeledMatrix m(4, 2, {0, 0, 2, 2, 2, 2, 4, 0}, {0, 0, 1, 1});
    const auto b = geode_direction(m);
    CHECK(std::abs(b[1]) < 1e-12);
    CHECK(std::abs(b[0]) == doctest::Approx(1.0));
    CHECK(rank_geode(m).ranks[1] == 2);
}

TEST_CASE("GeoDE: a duplicated informative feature stays finite")
{
    Rng rng(43);
    std::vector<double> v;
    std::vector<std::uint8_t> y;
    for (int r = 0; r < 10; ++r) {
        const bool pos = r % 2 == 1;
        const double x0 = standard_normal(rng) + (pos ? 1.5 : 0.0);
        v.insert(v.end(), {x0, standard_normal(rng), x0});
        y.push_back(pos);
    }
    const LabeledMatrix m(10, 3, v, y);
    const auto b = geode_direction(m);
    const auto ref = oracle::dense_geode(m, 0.5);
    for (std::size_t f = 0; f < 3; ++f) {
        CHECK(std::isfinite(b[f]));
        CHECK(b[f] == doctest::Approx(ref[f]).epsilon(1e-10));
    }
    CHECK(b[0] == doctest::Approx(b[2]).epsilon(1e-12));
}

TEST_CASE("GeoDE Woodbury path agrees with the dense solve when p < d")
{
    Rng rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = oracle::random_matrix(6 + 2 * uniform_index(rng, 5), 30 + uniform_index(rng, 30), rng);
        const auto b = geode_direction(m);
        const auto ref = oracle::dense_geode(m, 0.5);
        for (std::size_t f = 0; f < b.size(); ++f) {
            CHECK(b[f] == doctest::Approx(ref[f]).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("GeoDE rejects data with no within-class variation")
{
    const LabeledMatrix m(4, 2, {1, 1, 1, 1, 2, 2, 2, 2}, {0, 0, 1, 1});
    CHECK_THROWS_AS(geode_direction(m), Error);
}

TEST_CASE("ReliefF matches the brute-force loop on a six-sample instance")
{
    // Feature 0 separates two tight clusters; feature 1 is noise; feature 2
    // is constant.
    const LabeledMatrix m(6, 3,
                          {0.0, 0.3, 7, 0.1, 0.9, 7, 0.2, 0.1, 7,
                           5.0, 0.5, 7, 5.1, 0.2, 7, 5.2, 0.8, 7},
                          {0, 0, 0, 1, 1, 1});
    const auto w = relieff_weights(m, 10); // clamps to k = 2
    const auto ref = oracle::brute_relieff(m, 2);
    for (std::size_t f = 0; f < 3; ++f) {
        CHECK(w[f] == doctest::Approx(ref[f]).epsilon(1e-14));
    }
    CHECK(w[0] > 0.0);
    CHECK(w[2] == 0.0);
    CHECK(rank_relieff(m).ranks[0] == 1);
}

TEST_CASE("ReliefF matches the brute-force loop on random data")
{
    Rng rng(53);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t p = 6 + 2 * uniform_index(rng, 12);
        const auto m = oracle::random_matrix(p, 2 + uniform_index(rng, 10), rng);
        const std::size_t k = 1 + uniform_index(rng, 12);
        const auto w = relieff_weights(m, k);
        const auto ref = oracle::brute_relieff(m, std::min(k, p / 2 - 1));
        for (std::size_t f = 0; f < w.size(); ++f) {
            CHECK(w[f] == doctest::Approx(ref[f]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("ReliefF constant feature weight is exactly zero")
{
    Rng rng(59);
    const auto base = oracle::random_matrix(40, 8, rng);
    std::vector<double> v(base.values().begin(), base.values().end());
    for (std::size_t r = 0; r < 40; ++r) {
        v[r * 8 + 3] = 2.5;
    }
    const LabeledMatrix m(40, 8, v, {base.labels().begin(), base.labels().end()});
    CHECK(relieff_weights(m)[3] == 0.0);
}

TEST_CASE("ReliefF rejects a singleton class")
{
    const LabeledMatrix m(3, 1, {1, 2, 3}, {0, 0, 1});
    CHECK_THROWS_AS(relieff_weights(m), Error);
}

TEST_CASE("ReliefF pure noise stays below informative features")
{
    Rng rng(61);
    const auto syn = generate_synthetic(100, 40, 5, 2.0, rng);
    const auto w = relieff_weights(syn.dataset.matrix());
    double noise_max = 0.0;
    double noise_mean = 0.0;
    for (std::size_t f = 5; f < 40; ++f) {
        noise_max = std::max(noise_max, w[f]);
        noise_mean += w[f] / 35.0;
    }
    CHECK(std::abs(noise_mean) < 0.02);
    for (std::size_t f = 0; f < 5; ++f) {
        CHECK(w[f] > noise_max);
    }
}

TEST_CASE("every ranker recovers planted features and yields a permutation")
{
    Rng rng(2024);
    const auto syn = generate_synthetic(100, 200, 20, 2.0, rng);
    for (auto r : kAllRankers) {
        CAPTURE(ranker_name(r));
        const auto list = rank_features(syn.dataset.matrix(), r);
        CHECK(list.ranker == r);
        CHECK(is_permutation_ranking(list.ranks));
        CHECK(recovered_in_top(list, 20, 40) >= 15);
        CHECK(list == rank_features(syn.dataset.matrix(), r));
    }
}

TEST_CASE("rankers produce permutations on random shapes")
{
    Rng rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = oracle::random_matrix(6 + 2 * uniform_index(rng, 10), 1 + uniform_index(rng, 50), rng);
        for (auto r : kAllRankers) {
            const auto list = rank_features(m, r);
            CHECK(is_permutation_ranking(list.ranks));
            CHECK(list.scores.size() == m.cols());
        }
    }
}

} // TEST_SUITE
