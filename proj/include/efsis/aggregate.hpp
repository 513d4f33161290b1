#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "efsis/rankers.hpp"

namespace efsis {

/// Top-t selection: sorted feature indices, size t >= 1.
struct FeatureSubset {
    std::vector<std::size_t> members;

    std::size_t size() const { return members.size(); }
    bool contains(std::size_t f) const;

    friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;
};

/// Average relative recurrence of the union's features over M subsets,
/// in [1/M, 1].
struct StabilityScore {
    double value = 0.0;
    std::size_t subsets = 0;

    friend bool operator==(const StabilityScore&, const StabilityScore&) = default;
};

/// Per-feature scores in the natural-log domain; smaller is better.
///
/// When the score is a plain product of integer ranks (possibly raised to a
/// common positive exponent) the factors are kept so that finalize() can
/// order near-equal log sums by the exact integer product.
struct ScoreTable {
    std::vector<double> log_scores;
    std::vector<std::uint32_t> factors; // row-major, factor_count per feature
    std::size_t factor_count = 0;

    bool has_exact_factors() const { return factor_count > 0; }
};

/// Three-way comparison of the exact products of features a and b.
int compare_exact_products(const ScoreTable& table, std::size_t a, std::size_t b);

/// Exponent applied to each ranker's aggregated rank in the weighted product:
/// Paper uses (1 - S_n), Prose uses S_n.
enum class WeightMode { Paper, Prose };

std::string_view weight_mode_name(WeightMode mode);
WeightMode parse_weight_mode(std::string_view name);

StabilityScore stability(std::span<const FeatureSubset> subsets);

/// log_score(f) = sum_m ln rank_m(f), accumulated in list order.
ScoreTable rank_product(std::span<const RankedList> lists);

/// log_score(f) = sum_n w_n ln rank_n(f) with w_n = 1 - S_n (Paper) or S_n (Prose).
ScoreTable weighted_rank_product(std::span<const RankedList> lists,
                                 std::span<const double> stabilities,
                                 WeightMode mode = WeightMode::Paper);

/// Ascending log score, ties by feature index; rank 1 = smallest score.
RankedList finalize(const ScoreTable& table);

FeatureSubset top_t(const RankedList& list, std::size_t t);

} // namespace efsis
