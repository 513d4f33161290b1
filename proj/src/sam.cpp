#include <algorithm>
#include <cmath>

#include "efsis/error.hpp"
#include "efsis/rankers.hpp"

namespace efsis {

// s0 is the median of the per-feature standard errors rather than the
// percentile search of the original SAM procedure.
std::vector<double> sam_statistic(const LabeledMatrix& data)
{
    const std::size_t d = data.cols();
    const double n1 = static_cast<double>(data.count_positive());
    const double n0 = static_cast<double>(data.count_negative());
    if (n1 < 1 || n0 < 1 || n0 + n1 < 3) {
        throw Error("SAM needs both classes and at least three samples");
    }
    std::vector<double> mean_pos(d, 0.0), mean_neg(d, 0.0);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        auto& acc = data.positive(r) ? mean_pos : mean_neg;
        auto row = data.row(r);
        for (std::size_t f = 0; f < d; ++f) {
            acc[f] += row[f];
        }
    }
    for (std::size_t f = 0; f < d; ++f) {
        mean_pos[f] /= n1;
        mean_neg[f] /= n0;
    }
    std::vector<double> ss(d, 0.0);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const auto& mu = data.positive(r) ? mean_pos : mean_neg;
        auto row = data.row(r);
        for (std::size_t f = 0; f < d; ++f) {
            const double c = row[f] - mu[f];
            ss[f] += c * c;
        }
    }
    const double factor = (1.0 / n1 + 1.0 / n0) / (n0 + n1 - 2.0);
    std::vector<double> s(d);
    for (std::size_t f = 0; f < d; ++f) {
        s[f] = std::sqrt(factor * ss[f]);
    }

    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    double s0 = d % 2 == 1 ? sorted[d / 2] : 0.5 * (sorted[d / 2 - 1] + sorted[d / 2]);
    if (s0 <= 0.0) {
        // More than half the features have no within-class spread.
        auto it = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
        if (it == sorted.end()) {
            throw Error("SAM: degenerate data, no feature varies within classes");
        }
        s0 = *it;
    }
    std::vector<double> stat(d);
    for (std::size_t f = 0; f < d; ++f) {
        stat[f] = (mean_pos[f] - mean_neg[f]) / (s[f] + s0);
    }
    return stat;
}

RankedList rank_sam(const LabeledMatrix& data)
{
    auto stat = sam_statistic(data);
    for (auto& v : stat) {
        v = std::abs(v);
    }
    auto list = scores_to_ranks(stat, SortOrder::Descending);
    list.ranker = Ranker::Sam;
    return list;
}

} // namespace efsis
