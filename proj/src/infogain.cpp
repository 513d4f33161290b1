#include <algorithm>
#include <cmath>
#include <numeric>

#include "efsis/error.hpp"
#include "efsis/rankers.hpp"

namespace efsis {
namespace {

double entropy_bits(double pos, double total)
{
    if (total <= 0.0 || pos <= 0.0 || pos >= total) {
        return 0.0;
    }
    const double q = pos / total;
    return -(q * std::log2(q) + (1.0 - q) * std::log2(1.0 - q));
}

} // namespace

// Discretization: features with fewer than `bins` distinct values get one bin
// per value; otherwise cut points are the last value of each equal-count
// chunk of the sorted column and a value equal to a cut point falls in the
// lower bin. Bins depend only on the order of values.
std::vector<double> infogain_scores(const LabeledMatrix& data, std::size_t bins)
{
    const std::size_t p = data.rows();
    const std::size_t d = data.cols();
    if (p == 0 || bins < 1) {
        throw Error("information gain needs samples and at least one bin");
    }
    const double total_pos = static_cast<double>(data.count_positive());
    const double h_y = entropy_bits(total_pos, static_cast<double>(p));

    std::vector<double> gains(d);
    std::vector<std::size_t> idx(p);
    std::vector<std::size_t> bin_of(p);
    std::vector<double> bin_total, bin_pos;
    for (std::size_t f = 0; f < d; ++f) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return data.value(a, f) < data.value(b, f);
        });
        std::size_t distinct = 1;
        for (std::size_t i = 1; i < p; ++i) {
            if (data.value(idx[i], f) != data.value(idx[i - 1], f)) {
                ++distinct;
            }
        }

        std::size_t nbins = 0;
        if (distinct < bins) {
            std::size_t b = 0;
            for (std::size_t i = 0; i < p; ++i) {
                if (i > 0 && data.value(idx[i], f) != data.value(idx[i - 1], f)) {
                    ++b;
                }
                bin_of[i] = b;
            }
            nbins = distinct;
        } else {
            std::vector<double> cuts;
            for (std::size_t j = 1; j < bins; ++j) {
                const std::size_t pos = (j * p + bins - 1) / bins; // ceil(j*p/B)
                cuts.push_back(data.value(idx[pos - 1], f));
            }
            for (std::size_t i = 0; i < p; ++i) {
                const double v = data.value(idx[i], f);
                bin_of[i] = static_cast<std::size_t>(
                    std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
            }
            nbins = bins;
        }

        bin_total.assign(nbins, 0.0);
        bin_pos.assign(nbins, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            bin_total[bin_of[i]] += 1.0;
            if (data.positive(idx[i])) {
                bin_pos[bin_of[i]] += 1.0;
            }
        }
        double h_cond = 0.0;
        for (std::size_t b = 0; b < nbins; ++b) {
            h_cond += bin_total[b] / static_cast<double>(p) * entropy_bits(bin_pos[b], bin_total[b]);
        }
        gains[f] = std::max(0.0, h_y - h_cond);
    }
    return gains;
}

RankedList rank_infogain(const LabeledMatrix& data)
{
    auto list = scores_to_ranks(infogain_scores(data), SortOrder::Descending);
    list.ranker = Ranker::InfoGain;
    return list;
}

} // namespace efsis
