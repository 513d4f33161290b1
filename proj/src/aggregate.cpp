#include "efsis/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "efsis/error.hpp"

namespace efsis {

bool FeatureSubset::contains(std::size_t f) const
{
    return std::binary_search(members.begin(), members.end(), f);
}

std::string_view weight_mode_name(WeightMode mode)
{
    return mode == WeightMode::Paper ? "paper" : "prose";
}

WeightMode parse_weight_mode(std::string_view name)
{
    if (name == "paper") return WeightMode::Paper;
    if (name == "prose") return WeightMode::Prose;
    throw Error("unknown weight mode '" + std::string(name) + "'");
}

StabilityScore stability(std::span<const FeatureSubset> subsets)
{
    if (subsets.size() < 2) {
        throw Error("stability needs at least two subsets");
    }
    const std::size_t t = subsets.front().size();
    if (t == 0) {
        throw Error("stability of empty subsets is undefined");
    }
    std::vector<std::size_t> all;
    for (const auto& s : subsets) {
        if (s.size() != t) {
            throw Error("stability: subsets have different sizes");
        }
        all.insert(all.end(), s.members.begin(), s.members.end());
    }
    std::sort(all.begin(), all.end());
    const auto distinct = static_cast<std::size_t>(
        std::unique(all.begin(), all.end()) - all.begin());
    // sum_f freq(f) is M*t, so S = (M*t / M) / |F| = t / |F|; keep the
    // frequency form to stay close to the definition.
    const double m = static_cast<double>(subsets.size());
    const double freq_sum = static_cast<double>(subsets.size() * t);
    return {freq_sum / m / static_cast<double>(distinct), subsets.size()};
}

namespace {

void check_lists(std::span<const RankedList> lists)
{
    if (lists.empty()) {
        throw Error("rank aggregation needs at least one list");
    }
    const std::size_t d = lists.front().size();
    for (const auto& l : lists) {
        if (l.size() != d) {
            throw Error("rank aggregation: lists cover different feature sets");
        }
    }
}

using BigUint = std::vector<std::uint32_t>; // little-endian base 2^32

BigUint product_of(std::span<const std::uint32_t> factors)
{
    BigUint acc{1};
    for (std::uint32_t f : factors) {
        std::uint64_t carry = 0;
        for (auto& limb : acc) {
            const std::uint64_t v = static_cast<std::uint64_t>(limb) * f + carry;
            limb = static_cast<std::uint32_t>(v);
            carry = v >> 32;
        }
        if (carry != 0) {
            acc.push_back(static_cast<std::uint32_t>(carry));
        }
    }
    while (acc.size() > 1 && acc.back() == 0) {
        acc.pop_back();
    }
    return acc;
}

void store_factors(ScoreTable& table, std::span<const RankedList> lists)
{
    const std::size_t d = lists.front().size();
    table.factor_count = lists.size();
    table.factors.resize(d * lists.size());
    for (std::size_t m = 0; m < lists.size(); ++m) {
        for (std::size_t f = 0; f < d; ++f) {
            table.factors[f * lists.size() + m] = static_cast<std::uint32_t>(lists[m].ranks[f]);
        }
    }
}

} // namespace

int compare_exact_products(const ScoreTable& table, std::size_t a, std::size_t b)
{
    const std::size_t k = table.factor_count;
    const std::span<const std::uint32_t> all(table.factors);
    const BigUint pa = product_of(all.subspan(a * k, k));
    const BigUint pb = product_of(all.subspan(b * k, k));
    if (pa.size() != pb.size()) {
        return pa.size() < pb.size() ? -1 : 1;
    }
    for (std::size_t i = pa.size(); i-- > 0;) {
        if (pa[i] != pb[i]) {
            return pa[i] < pb[i] ? -1 : 1;
        }
    }
    return 0;
}

ScoreTable rank_product(std::span<const RankedList> lists)
{
    check_lists(lists);
    ScoreTable table;
    table.log_scores.assign(lists.front().size(), 0.0);
    for (const auto& l : lists) {
        for (std::size_t f = 0; f < l.size(); ++f) {
            table.log_scores[f] += std::log(static_cast<double>(l.ranks[f]));
        }
    }
    store_factors(table, lists);
    return table;
}

ScoreTable weighted_rank_product(std::span<const RankedList> lists,
                                 std::span<const double> stabilities, WeightMode mode)
{
    check_lists(lists);
    if (stabilities.size() != lists.size()) {
        throw Error("weighted rank product: " + std::to_string(lists.size()) + " lists but "
                    + std::to_string(stabilities.size()) + " stabilities");
    }
    ScoreTable table;
    table.log_scores.assign(lists.front().size(), 0.0);
    for (std::size_t n = 0; n < lists.size(); ++n) {
        const double s = stabilities[n];
        if (!(s >= 0.0 && s <= 1.0)) {
            throw Error("stability weight outside [0, 1]");
        }
        const double w = mode == WeightMode::Paper ? 1.0 - s : s;
        const auto& l = lists[n];
        for (std::size_t f = 0; f < l.size(); ++f) {
            table.log_scores[f] += w * std::log(static_cast<double>(l.ranks[f]));
        }
    }
    // A common positive exponent is a monotone transform of the plain product.
    const bool uniform = std::all_of(stabilities.begin(), stabilities.end(),
                                     [&](double s) { return s == stabilities.front(); });
    const double w0 = mode == WeightMode::Paper ? 1.0 - stabilities.front() : stabilities.front();
    if (uniform && w0 > 0.0) {
        store_factors(table, lists);
    }
    return table;
}

RankedList finalize(const ScoreTable& table)
{
    if (!table.has_exact_factors()) {
        return scores_to_ranks(table.log_scores, SortOrder::Ascending);
    }
    const auto& ls = table.log_scores;
    const std::size_t d = ls.size();
    if (table.factors.size() != d * table.factor_count) {
        throw Error("score table factor matrix has the wrong size");
    }
    for (double v : ls) {
        if (!std::isfinite(v)) {
            throw Error("cannot rank non-finite score");
        }
    }
    // Log sums are accurate to a few ulps; anything closer than this margin
    // is decided by the exact product.
    auto less = [&](std::size_t a, std::size_t b) {
        const double gap = ls[a] - ls[b];
        const double margin = 1e-9 * std::max({1.0, std::abs(ls[a]), std::abs(ls[b])});
        if (std::abs(gap) > margin) {
            return gap < 0.0;
        }
        const int c = compare_exact_products(table, a, b);
        return c != 0 ? c < 0 : a < b;
    };
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), less);
    RankedList list;
    list.ranks.resize(d);
    for (std::size_t pos = 0; pos < d; ++pos) {
        list.ranks[idx[pos]] = pos + 1;
    }
    list.scores = ls;
    return list;
}

FeatureSubset top_t(const RankedList& list, std::size_t t)
{
    if (t < 1 || t > list.size()) {
        throw Error("top_t: t=" + std::to_string(t) + " outside [1, "
                    + std::to_string(list.size()) + "]");
    }
    FeatureSubset s;
    for (std::size_t f = 0; f < list.size(); ++f) {
        if (list.ranks[f] <= t) {
            s.members.push_back(f);
        }
    }
    return s;
}

} // namespace efsis
