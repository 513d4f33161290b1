#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "efsis/error.hpp"
#include "efsis/rankers.hpp"

namespace efsis {

std::string_view ranker_name(Ranker r)
{
    switch (r) {
    case Ranker::Sam: return "SAM";
    case Ranker::InfoGain: return "InfoGain";
    case Ranker::GeoDE: return "GeoDE";
    case Ranker::ReliefF: return "ReliefF";
    }
    return "?";
}

Ranker parse_ranker(std::string_view name)
{
    std::string lower;
    for (char c : name) {
        if (c != '_' && c != '-') {
            lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (lower == "sam") return Ranker::Sam;
    if (lower == "infogain") return Ranker::InfoGain;
    if (lower == "geode") return Ranker::GeoDE;
    if (lower == "relieff") return Ranker::ReliefF;
    throw Error("unknown ranker '" + std::string(name) + "'");
}

std::vector<std::size_t> RankedList::order() const
{
    std::vector<std::size_t> out(ranks.size());
    for (std::size_t f = 0; f < ranks.size(); ++f) {
        out[ranks[f] - 1] = f;
    }
    return out;
}

RankedList scores_to_ranks(std::span<const double> scores, SortOrder order)
{
    for (double s : scores) {
        if (!std::isfinite(s)) {
            throw Error("cannot rank non-finite score");
        }
    }
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (order == SortOrder::Descending) {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    } else {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    }
    RankedList list;
    list.ranks.resize(scores.size());
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
        list.ranks[idx[pos]] = pos + 1;
    }
    list.scores.assign(scores.begin(), scores.end());
    return list;
}

bool is_permutation_ranking(std::span<const std::size_t> ranks)
{
    std::vector<bool> seen(ranks.size() + 1, false);
    for (std::size_t r : ranks) {
        if (r == 0 || r > ranks.size() || seen[r]) {
            return false;
        }
        seen[r] = true;
    }
    return true;
}

RankedList rank_features(const LabeledMatrix& data, Ranker ranker)
{
    switch (ranker) {
    case Ranker::Sam: return rank_sam(data);
    case Ranker::InfoGain: return rank_infogain(data);
    case Ranker::GeoDE: return rank_geode(data);
    case Ranker::ReliefF: return rank_relieff(data);
    }
    throw Error("unknown ranker");
}

} // namespace efsis
