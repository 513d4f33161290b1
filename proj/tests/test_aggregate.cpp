#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "efsis/aggregate.hpp"
#include "efsis/error.hpp"
#include "oracles.hpp"

using namespace efsis;

namespace {

RankedList list_of(std::vector<std::size_t> ranks)
{
    RankedList l;
    l.ranks = std::move(ranks);
    l.scores.assign(l.ranks.size(), 0.0);
    return l;
}

FeatureSubset subset(std::vector<std::size_t> members)
{
    std::sort(members.begin(), members.end());
    return {std::move(members)};
}

std::vector<RankedList> random_lists(std::size_t d, std::size_t m, Rng& rng)
{
    std::vector<RankedList> lists;
    for (std::size_t i = 0; i < m; ++i) {
        lists.push_back(list_of(oracle::random_ranks(d, rng)));
    }
    return lists;
}

} // namespace

TEST_SUITE("aggregate") {

TEST_CASE("stability hand cases")
{
    const std::vector<FeatureSubset> same{subset({0, 1, 2}), subset({0, 1, 2})};
    CHECK(stability(same).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stability(same).subsets == 2);

    const std::vector<FeatureSubset> disjoint{subset({0, 1}), subset({2, 3})};
    CHECK(stability(disjoint).value == doctest::Approx(0.5).epsilon(1e-12));

    const std::vector<FeatureSubset> shared{subset({0, 1}), subset({0, 2}), subset({0, 3})};
    CHECK(stability(shared).value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("stability preconditions")
{
    const std::vector<FeatureSubset> one{subset({0})};
    CHECK_THROWS_AS(stability(one), Error);
    const std::vector<FeatureSubset> uneven{subset({0}), subset({0, 1})};
    CHECK_THROWS_AS(stability(uneven), Error);
}

TEST_CASE("stability matches the frequency oracle, bounds and symmetry")
{
    Rng rng(71);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 2 + uniform_index(rng, 30);
        const std::size_t t = 1 + uniform_index(rng, d);
        const std::size_t m = 2 + uniform_index(rng, 8);
        std::vector<FeatureSubset> subsets;
        std::vector<std::vector<std::size_t>> raw;
        for (std::size_t i = 0; i < m; ++i) {
            auto perm = oracle::random_ranks(d, rng);
            std::vector<std::size_t> members;
            for (std::size_t f = 0; f < d; ++f) {
                if (perm[f] <= t) {
                    members.push_back(f);
                }
            }
            raw.push_back(members);
            subsets.push_back({members});
        }
        const double s = stability(subsets).value;
        CHECK(s == doctest::Approx(oracle::stability(raw)).epsilon(1e-12));
        CHECK(s >= 1.0 / static_cast<double>(m) - 1e-12);
        CHECK(s <= 1.0 + 1e-12);

        auto shuffled = subsets;
        std::reverse(shuffled.begin(), shuffled.end());
        std::swap(shuffled.front(), shuffled[shuffled.size() / 2]);
        CHECK(stability(shuffled).value == s);

        const bool all_equal = std::all_of(subsets.begin(), subsets.end(),
                                           [&](const auto& x) { return x == subsets.front(); });
        CHECK((s == 1.0) == all_equal);
    }
}

TEST_CASE("rank product hand cases")
{
    const std::vector<RankedList> three{list_of({2, 1, 3, 4}), list_of({3, 1, 2, 4}),
                                        list_of({4, 1, 3, 2})};
    const auto table = rank_product(three);
    CHECK(std::exp(table.log_scores[0]) == doctest::Approx(24.0).epsilon(1e-9));

    // [f1,f2,f3] and [f2,f1,f3] give products (2,2,9); the tie goes to f1.
    const std::vector<RankedList> swapped{list_of({1, 2, 3}), list_of({2, 1, 3})};
    CHECK(finalize(rank_product(swapped)).ranks == std::vector<std::size_t>{1, 2, 3});

    const std::vector<RankedList> single{list_of({3, 1, 4, 2})};
    CHECK(finalize(rank_product(single)).ranks == single[0].ranks);
}

TEST_CASE("rank product orders by the exact integer product")
{
    Rng rng(73);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = 1 + uniform_index(rng, 50);
        const std::size_t m = 1 + uniform_index(rng, 10);
        const auto lists = random_lists(d, m, rng);
        std::vector<std::vector<std::size_t>> raw;
        for (const auto& l : lists) {
            raw.push_back(l.ranks);
        }
        CHECK(finalize(rank_product(lists)).order() == oracle::exact_product_order(raw));
    }
}

TEST_CASE("exact tie-break separates 6 = 1*6 from 2*3 and equal products")
{
    // Feature 0: 1*6, feature 1: 2*3, feature 2: 3*2, feature 3..: larger.
    const std::vector<RankedList> lists{list_of({1, 2, 3, 4, 5, 6}), list_of({6, 3, 2, 4, 5, 1})};
    const auto table = rank_product(lists);
    CHECK(compare_exact_products(table, 0, 1) == 0);
    CHECK(compare_exact_products(table, 3, 4) < 0);
    // products: 6, 6, 6, 16, 25, 6 -> index order among the ties
    CHECK(finalize(table).ranks == std::vector<std::size_t>{1, 2, 3, 5, 6, 4});
}

TEST_CASE("weighted product hand cases")
{
    const std::vector<RankedList> lists{list_of({2, 1}), list_of({3, 1})};
    const std::vector<double> s10{1.0, 0.0};
    CHECK(std::exp(weighted_rank_product(lists, s10).log_scores[0])
          == doctest::Approx(3.0).epsilon(1e-9));

    const std::vector<RankedList> lists49{list_of({4, 1, 2, 3, 5, 6, 7, 8, 9}),
                                          list_of({9, 1, 2, 3, 4, 5, 6, 7, 8})};
    const std::vector<double> half{0.5, 0.5};
    CHECK(std::exp(weighted_rank_product(lists49, half).log_scores[0])
          == doctest::Approx(6.0).epsilon(1e-9));

    const std::vector<double> zero{0.0, 0.0};
    CHECK(std::exp(weighted_rank_product(lists, zero).log_scores[0])
          == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("prose mode uses S as the exponent")
{
    const std::vector<RankedList> lists{list_of({2, 1}), list_of({3, 1})};
    const std::vector<double> s{1.0, 0.0};
    CHECK(std::exp(weighted_rank_product(lists, s, WeightMode::Prose).log_scores[0])
          == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(parse_weight_mode("prose") == WeightMode::Prose);
    CHECK(weight_mode_name(WeightMode::Paper) == "paper");
    CHECK_THROWS_AS(parse_weight_mode("other"), Error);
}

TEST_CASE("weighted product preconditions")
{
    const std::vector<RankedList> lists{list_of({1, 2}), list_of({2, 1})};
    CHECK_THROWS_AS(weighted_rank_product(lists, std::vector<double>{0.5}), Error);
    CHECK_THROWS_AS(weighted_rank_product(lists, std::vector<double>{0.5, 1.5}), Error);
    const std::vector<RankedList> uneven{list_of({1, 2}), list_of({1, 2, 3})};
    CHECK_THROWS_AS(rank_product(uneven), Error);
    CHECK_THROWS_AS(rank_product(std::vector<RankedList>{}), Error);
}

TEST_CASE("zero and uniform stabilities reproduce the unweighted ordering")
{
    Rng rng(79);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + uniform_index(rng, 50);
        const std::size_t n = 1 + uniform_index(rng, 6);
        const auto lists = random_lists(d, n, rng);
        const auto plain = finalize(rank_product(lists)).ranks;

        CHECK(finalize(weighted_rank_product(lists, std::vector<double>(n, 0.0))).ranks == plain);
        const double s = 0.99 * uniform_unit(rng);
        CHECK(finalize(weighted_rank_product(lists, std::vector<double>(n, s))).ranks == plain);
        CHECK(finalize(weighted_rank_product(lists, std::vector<double>(n, 1.0 - s),
                                             WeightMode::Prose)).ranks
              == plain);
    }
}

TEST_CASE("all stabilities one leaves index order")
{
    const std::vector<RankedList> lists{list_of({3, 1, 2}), list_of({3, 2, 1})};
    CHECK(finalize(weighted_rank_product(lists, std::vector<double>{1.0, 1.0})).ranks
          == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("aggregation is equivariant under feature relabelling")
{
    Rng rng(83);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + uniform_index(rng, 30);
        const std::size_t n = 2 + uniform_index(rng, 4);
        const auto lists = random_lists(d, n, rng);
        std::vector<double> s(n);
        for (auto& v : s) {
            v = uniform_unit(rng);
        }
        // pi maps old index -> new index
        const auto pi1 = oracle::random_ranks(d, rng);
        std::vector<RankedList> moved;
        for (const auto& l : lists) {
            RankedList m = l;
            for (std::size_t f = 0; f < d; ++f) {
                m.ranks[pi1[f] - 1] = l.ranks[f];
            }
            moved.push_back(m);
        }
        const auto a = weighted_rank_product(lists, s).log_scores;
        const auto b = weighted_rank_product(moved, s).log_scores;
        for (std::size_t f = 0; f < d; ++f) {
            CHECK(a[f] == b[pi1[f] - 1]);
        }
        // Orderings agree wherever the original has no exact ties.
        const auto ra = finalize(rank_product(lists)).ranks;
        const auto rb = finalize(rank_product(moved)).ranks;
        const auto exact = rank_product(lists);
        bool tie = false;
        for (std::size_t f = 0; f < d && !tie; ++f) {
            for (std::size_t g = f + 1; g < d; ++g) {
                if (compare_exact_products(exact, f, g) == 0) {
                    tie = true;
                    break;
                }
            }
        }
        if (!tie) {
            for (std::size_t f = 0; f < d; ++f) {
                CHECK(ra[f] == rb[pi1[f] - 1]);
            }
        }
    }
}

TEST_CASE("finalize hand cases")
{
    ScoreTable t;
    t.log_scores = {std::log(24.0), std::log(6.0), std::log(100.0)};
    CHECK(finalize(t).ranks == std::vector<std::size_t>{2, 1, 3});
    t.log_scores = {1.0, 1.0, 1.0};
    CHECK(finalize(t).ranks == std::vector<std::size_t>{1, 2, 3});
    t.log_scores = {0.7};
    CHECK(finalize(t).ranks == std::vector<std::size_t>{1});
    t.log_scores = {0.7, NAN};
    CHECK_THROWS_AS(finalize(t), Error);
}

TEST_CASE("top_t")
{
    const auto l = list_of({2, 1, 3});
    CHECK(top_t(l, 2).members == std::vector<std::size_t>{0, 1});
    CHECK(top_t(l, 1).members == std::vector<std::size_t>{1});
    CHECK(top_t(l, 3).members == std::vector<std::size_t>{0, 1, 2});
    CHECK(top_t(l, 2).contains(0));
    CHECK_FALSE(top_t(l, 2).contains(2));
    CHECK_THROWS_AS(top_t(l, 0), Error);
    CHECK_THROWS_AS(top_t(l, 4), Error);
}

} // TEST_SUITE
