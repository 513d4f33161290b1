#include <algorithm>
#include <cmath>
#include <numeric>

#include "efsis/error.hpp"
#include "efsis/rankers.hpp"

namespace efsis {

// ReliefF with every sample as an iteration centre, Manhattan distance over
// range-normalised features, k nearest hits and misses (ties by sample index).
std::vector<double> relieff_weights(const LabeledMatrix& data, std::size_t neighbors)
{
    const std::size_t p = data.rows();
    const std::size_t d = data.cols();
    const std::size_t smallest = std::min(data.count_positive(), data.count_negative());
    if (smallest <= 1) {
        throw Error("ReliefF needs at least two samples per class");
    }
    const std::size_t k = std::min(neighbors, smallest - 1);
    if (k == 0) {
        throw Error("ReliefF neighbour count must be positive");
    }

    std::vector<double> lo(d), span(d);
    for (std::size_t f = 0; f < d; ++f) {
        double mn = data.value(0, f);
        double mx = mn;
        for (std::size_t r = 1; r < p; ++r) {
            mn = std::min(mn, data.value(r, f));
            mx = std::max(mx, data.value(r, f));
        }
        lo[f] = mn;
        span[f] = mx - mn;
    }
    std::vector<double> norm(p * d);
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t f = 0; f < d; ++f) {
            norm[r * d + f] = span[f] > 0.0 ? (data.value(r, f) - lo[f]) / span[f] : 0.0;
        }
    }

    std::vector<double> dist(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            double s = 0.0;
            const double* a = &norm[i * d];
            const double* b = &norm[j * d];
            for (std::size_t f = 0; f < d; ++f) {
                s += std::abs(a[f] - b[f]);
            }
            dist[i * p + j] = s;
            dist[j * p + i] = s;
        }
    }

    std::vector<double> weights(d, 0.0);
    std::vector<double> hit_sum(d), miss_sum(d);
    std::vector<std::size_t> hits, misses;
    const double denom = static_cast<double>(p) * static_cast<double>(k);
    for (std::size_t i = 0; i < p; ++i) {
        hits.clear();
        misses.clear();
        for (std::size_t j = 0; j < p; ++j) {
            if (j == i) {
                continue;
            }
            (data.positive(j) == data.positive(i) ? hits : misses).push_back(j);
        }
        auto nearer = [&](std::size_t a, std::size_t b) {
            const double da = dist[i * p + a];
            const double db = dist[i * p + b];
            return da < db || (da == db && a < b);
        };
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), nearer);
        std::partial_sort(misses.begin(), misses.begin() + static_cast<std::ptrdiff_t>(k), misses.end(),
                          nearer);

        std::fill(hit_sum.begin(), hit_sum.end(), 0.0);
        std::fill(miss_sum.begin(), miss_sum.end(), 0.0);
        const double* xi = &norm[i * d];
        for (std::size_t n = 0; n < k; ++n) {
            const double* h = &norm[hits[n] * d];
            const double* m = &norm[misses[n] * d];
            for (std::size_t f = 0; f < d; ++f) {
                hit_sum[f] += std::abs(xi[f] - h[f]);
                miss_sum[f] += std::abs(xi[f] - m[f]);
            }
        }
        for (std::size_t f = 0; f < d; ++f) {
            weights[f] += miss_sum[f] / denom - hit_sum[f] / denom;
        }
    }
    return weights;
}

RankedList rank_relieff(const LabeledMatrix& data, std::size_t neighbors)
{
    auto list = scores_to_ranks(relieff_weights(data, neighbors), SortOrder::Descending);
    list.ranker = Ranker::ReliefF;
    return list;
}

} // namespace efsis
