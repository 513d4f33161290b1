#include <algorithm>
#include <cmath>
#include <numeric>

#include "efsis/error.hpp"
#include "efsis/eval.hpp"

namespace efsis {
namespace {

/// Mid-ranks (1-based) of values; equal values share the average rank.
std::vector<double> mid_ranks(std::span<const double> values)
{
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && values[idx[j]] == values[idx[i]]) {
            ++j;
        }
        const double r = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t q = i; q < j; ++q) {
            ranks[idx[q]] = r;
        }
        i = j;
    }
    return ranks;
}

constexpr std::size_t kExactLimit = 25;

} // namespace

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels)
{
    if (scores.size() != labels.size()) {
        throw Error("auc: score and label counts differ");
    }
    double n_pos = 0.0;
    for (auto y : labels) {
        n_pos += y != 0 ? 1.0 : 0.0;
    }
    const double n_neg = static_cast<double>(labels.size()) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0) {
        throw Error("auc needs both classes");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) {
            throw Error("auc: non-finite score");
        }
    }
    const auto ranks = mid_ranks(scores);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0) {
            rank_sum += ranks[i];
        }
    }
    return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> first, std::span<const double> second)
{
    if (first.size() != second.size()) {
        throw Error("wilcoxon: paired samples differ in length");
    }
    std::vector<double> diff(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        diff[i] = first[i] - second[i];
    }
    return wilcoxon_signed_rank(diff);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences)
{
    std::vector<double> nonzero;
    for (double d : differences) {
        if (!std::isfinite(d)) {
            throw Error("wilcoxon: non-finite difference");
        }
        if (d != 0.0) {
            nonzero.push_back(d);
        }
    }
    if (nonzero.empty()) {
        throw Error("wilcoxon: no information, all differences are zero");
    }
    const std::size_t n = nonzero.size();
    std::vector<double> magnitude(n);
    for (std::size_t i = 0; i < n; ++i) {
        magnitude[i] = std::abs(nonzero[i]);
    }
    const auto ranks = mid_ranks(magnitude);

    WilcoxonResult result;
    result.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (nonzero[i] > 0.0) {
            result.w_plus += ranks[i];
        }
    }

    if (n <= kExactLimit) {
        // Doubled mid-ranks are integers; count sign patterns per doubled sum.
        std::vector<std::size_t> doubled(n);
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
            total += doubled[i];
        }
        std::vector<double> count(total + 1, 0.0);
        count[0] = 1.0;
        std::size_t reach = 0;
        for (std::size_t r : doubled) {
            for (std::size_t s = reach + 1; s-- > 0;) {
                if (count[s] != 0.0) {
                    count[s + r] += count[s];
                }
            }
            reach += r;
        }
        const auto observed = static_cast<std::size_t>(std::lround(2.0 * result.w_plus));
        const double patterns = std::ldexp(1.0, static_cast<int>(n));
        double lower = 0.0;
        double upper = 0.0;
        for (std::size_t s = 0; s <= total; ++s) {
            if (s <= observed) lower += count[s];
            if (s >= observed) upper += count[s];
        }
        result.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / patterns);
        result.exact = true;
        return result;
    }

    const double nd = static_cast<double>(n);
    const double expected = nd * (nd + 1.0) / 4.0;
    double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
    std::vector<double> sorted = magnitude;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) {
            ++j;
        }
        const double t = static_cast<double>(j - i);
        variance -= (t * t * t - t) / 48.0;
        i = j;
    }
    const double deviation = std::max(0.0, std::abs(result.w_plus - expected) - 0.5);
    const double z = variance > 0.0 ? deviation / std::sqrt(variance) : 0.0;
    result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

double mean(std::span<const double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values)
{
    if (values.size() < 2) {
        return 0.0;
    }
    const double mu = mean(values);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mu) * (v - mu);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

} // namespace efsis
