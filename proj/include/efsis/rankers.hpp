#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "efsis/dataset.hpp"

namespace efsis {

/// The four filter rankers. Order matches the default ensemble.
enum class Ranker { Sam, InfoGain, GeoDE, ReliefF };

inline constexpr std::array<Ranker, 4> kAllRankers{Ranker::Sam, Ranker::InfoGain, Ranker::GeoDE,
                                                   Ranker::ReliefF};

std::string_view ranker_name(Ranker r);
/// Case-insensitive: sam, infogain, geode, relieff.
Ranker parse_ranker(std::string_view name);

/// A total ordering of d features: ranks[f] in 1..d, 1 = most important.
/// `scores` holds the statistic that produced the ordering.
struct RankedList {
    std::vector<std::size_t> ranks;
    std::vector<double> scores;
    std::optional<Ranker> ranker;
    std::optional<std::size_t> bootstrap; // empty for aggregated lists

    std::size_t size() const { return ranks.size(); }
    /// Feature indices from rank 1 to rank d.
    std::vector<std::size_t> order() const;

    friend bool operator==(const RankedList&, const RankedList&) = default;
};

enum class SortOrder { Descending, Ascending };

/// Stable ranking by score, ties broken by ascending feature index.
RankedList scores_to_ranks(std::span<const double> scores, SortOrder order);

/// True when ranks is a bijection onto 1..d.
bool is_permutation_ranking(std::span<const std::size_t> ranks);

// Per-ranker statistics. Higher is more important for all four.

/// SAM relative difference d_i = (mean_pos - mean_neg) / (s_i + s0).
std::vector<double> sam_statistic(const LabeledMatrix& data);
/// Information gain in bits after equal-frequency discretization.
std::vector<double> infogain_scores(const LabeledMatrix& data, std::size_t bins = 10);
/// Unit-length shrinkage-LDA characteristic direction.
std::vector<double> geode_direction(const LabeledMatrix& data, double shrinkage = 0.5);
/// ReliefF weights with k nearest hits and misses.
std::vector<double> relieff_weights(const LabeledMatrix& data, std::size_t neighbors = 10);

RankedList rank_sam(const LabeledMatrix& data);
RankedList rank_infogain(const LabeledMatrix& data);
RankedList rank_geode(const LabeledMatrix& data);
RankedList rank_relieff(const LabeledMatrix& data, std::size_t neighbors = 10);

/// Dispatches to the ranker with its default parameters.
RankedList rank_features(const LabeledMatrix& data, Ranker ranker);

} // namespace efsis
