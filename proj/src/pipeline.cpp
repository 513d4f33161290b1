#include "efsis/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "efsis/error.hpp"
#include "efsis/parallel.hpp"

namespace efsis {

void PipelineConfig::validate() const
{
    if (bootstraps < 2) {
        throw Error("need at least two bootstraps");
    }
    if (rankers.empty()) {
        throw Error("no rankers configured");
    }
    if (!(percent > 0.0 && percent <= 100.0)) {
        throw Error("selection percentage must be in (0, 100]");
    }
}

std::size_t threshold_to_t(double percent, std::size_t features)
{
    if (!(percent > 0.0 && percent <= 100.0)) {
        throw Error("selection percentage must be in (0, 100]");
    }
    const double raw = std::floor(percent * static_cast<double>(features) / 100.0 + 0.5);
    const auto t = static_cast<std::size_t>(raw);
    return std::clamp<std::size_t>(t, 1, std::max<std::size_t>(features, 1));
}

namespace {

class ProgressReporter {
public:
    ProgressReporter(const PipelineHooks& hooks, std::size_t total) : hooks_(hooks), total_(total) {}

    void task_done()
    {
        if (hooks_.ranker_calls != nullptr) {
            hooks_.ranker_calls->fetch_add(1);
        }
        if (hooks_.progress) {
            std::lock_guard lock(mutex_);
            hooks_.progress(++done_, total_);
        }
    }

private:
    const PipelineHooks& hooks_;
    std::size_t total_;
    std::size_t done_ = 0;
    std::mutex mutex_;
};

RankedList run_ranker_named(const LabeledMatrix& data, Ranker ranker, const std::string& where)
{
    try {
        return rank_features(data, ranker);
    } catch (const std::exception& e) {
        throw Error("ranker " + std::string(ranker_name(ranker)) + " failed" + where + ": "
                    + e.what());
    }
}

} // namespace

BootstrapGrid compute_bootstrap_grid(const LabeledMatrix& data, const PipelineConfig& config,
                                     const PipelineHooks& hooks)
{
    config.validate();
    const std::size_t n_rankers = config.rankers.size();
    const std::size_t m_boot = config.bootstraps;

    BootstrapGrid grid;
    grid.rankers = config.rankers;
    grid.bootstraps.reserve(m_boot);
    for (std::size_t m = 1; m <= m_boot; ++m) {
        if (hooks.identical_bootstraps && m > 1) {
            BootstrapSet copy = grid.bootstraps.front();
            copy.index = m;
            grid.bootstraps.push_back(std::move(copy));
            continue;
        }
        Rng rng(derive_seed(config.seed, "bootstrap", m));
        grid.bootstraps.push_back(bootstrap(data, m, rng));
    }

    grid.lists.assign(n_rankers, std::vector<RankedList>(m_boot));
    ProgressReporter progress(hooks, n_rankers * m_boot);
    // One task per (ranker, bootstrap) cell; each writes only its own cell.
    parallel_for(n_rankers * m_boot, config.parallelism, [&](std::size_t task) {
        const std::size_t n = task / m_boot;
        const std::size_t m = task % m_boot;
        const LabeledMatrix sample = data.select_rows(grid.bootstraps[m].sample_indices);
        RankedList list = run_ranker_named(sample, config.rankers[n],
                                           " on bootstrap " + std::to_string(m + 1));
        list.bootstrap = m + 1;
        grid.lists[n][m] = std::move(list);
        progress.task_done();
    });

    grid.aggregated.reserve(n_rankers);
    for (std::size_t n = 0; n < n_rankers; ++n) {
        RankedList agg = finalize(rank_product(grid.lists[n]));
        agg.ranker = config.rankers[n];
        grid.aggregated.push_back(std::move(agg));
    }
    return grid;
}

EfsisResult assemble_efsis(const BootstrapGrid& grid, std::size_t t, WeightMode mode)
{
    EfsisResult result;
    result.t = t;
    result.rankers = grid.rankers;
    result.per_ranker_lists = grid.aggregated;
    std::vector<double> weights;
    for (const auto& lists : grid.lists) {
        std::vector<FeatureSubset> subsets;
        subsets.reserve(lists.size());
        for (const auto& l : lists) {
            subsets.push_back(top_t(l, t));
        }
        const StabilityScore s = stability(subsets);
        result.per_ranker_stabilities.push_back(s);
        weights.push_back(s.value);
        result.bootstrap_subsets.push_back(std::move(subsets));
    }
    result.final_list = finalize(weighted_rank_product(grid.aggregated, weights, mode));
    result.selected = top_t(result.final_list, t);
    return result;
}

EfsisResult run_efsis(const LabeledMatrix& data, const PipelineConfig& config,
                      const PipelineHooks& hooks)
{
    const BootstrapGrid grid = compute_bootstrap_grid(data, config, hooks);
    return assemble_efsis(grid, threshold_to_t(config.percent, data.cols()), config.weight_mode);
}

EfsisResult run_function_perturbation(const LabeledMatrix& data, const PipelineConfig& config,
                                      const PipelineHooks& hooks)
{
    if (config.rankers.empty()) {
        throw Error("no rankers configured");
    }
    const std::size_t t = threshold_to_t(config.percent, data.cols());
    EfsisResult result;
    result.t = t;
    result.rankers = config.rankers;
    result.per_ranker_lists.resize(config.rankers.size());
    ProgressReporter progress(hooks, config.rankers.size());
    parallel_for(config.rankers.size(), config.parallelism, [&](std::size_t n) {
        result.per_ranker_lists[n] = run_ranker_named(data, config.rankers[n], "");
        progress.task_done();
    });
    result.final_list = finalize(rank_product(result.per_ranker_lists));
    result.selected = top_t(result.final_list, t);
    return result;
}

RankedList run_single(const LabeledMatrix& data, Ranker ranker)
{
    return rank_features(data, ranker);
}

RankedList run_single(const LabeledMatrix& data, std::string_view ranker_name)
{
    return rank_features(data, parse_ranker(ranker_name));
}

} // namespace efsis
