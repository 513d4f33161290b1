#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "efsis/aggregate.hpp"
#include "efsis/dataset.hpp"
#include "efsis/rankers.hpp"

namespace efsis {

struct PipelineConfig {
    std::size_t bootstraps = 50;
    std::vector<Ranker> rankers{kAllRankers.begin(), kAllRankers.end()};
    double percent = 1.0; // selection threshold as % of features
    std::uint64_t seed = 1;
    WeightMode weight_mode = WeightMode::Paper;
    std::size_t parallelism = 1;

    /// Throws efsis::Error on an invalid configuration.
    void validate() const;
};

/// Observation and test points; none of them affect results.
struct PipelineHooks {
    /// Called after each ranker task as (completed, total). May be called
    /// from worker threads, serialized by the pipeline.
    std::function<void(std::size_t, std::size_t)> progress;
    /// Incremented once per ranker invocation.
    std::atomic<std::size_t>* ranker_calls = nullptr;
    /// Reuse bootstrap 1 for every m (forces S_n = 1).
    bool identical_bootstraps = false;
};

struct EfsisResult {
    RankedList final_list;
    std::vector<Ranker> rankers;
    std::vector<RankedList> per_ranker_lists;          // L_n
    std::vector<StabilityScore> per_ranker_stabilities; // S_n; empty for function perturbation
    std::vector<std::vector<FeatureSubset>> bootstrap_subsets; // [n][m] top-t of L_n^m
    FeatureSubset selected;
    std::size_t t = 0;

    friend bool operator==(const EfsisResult&, const EfsisResult&) = default;
};

/// The data-perturbation grid: lists[n][m] = ranker n on bootstrap m, plus
/// the per-ranker rank-product aggregates. Independent of the threshold.
struct BootstrapGrid {
    std::vector<Ranker> rankers;
    std::vector<BootstrapSet> bootstraps;
    std::vector<std::vector<RankedList>> lists;
    std::vector<RankedList> aggregated;
};

/// t = max(1, round-half-up(percent / 100 * d)), capped at d.
std::size_t threshold_to_t(double percent, std::size_t features);

BootstrapGrid compute_bootstrap_grid(const LabeledMatrix& data, const PipelineConfig& config,
                                     const PipelineHooks& hooks = {});

/// Stability per ranker and the weighted cross-ranker aggregation at threshold t.
EfsisResult assemble_efsis(const BootstrapGrid& grid, std::size_t t, WeightMode mode);

EfsisResult run_efsis(const LabeledMatrix& data, const PipelineConfig& config,
                      const PipelineHooks& hooks = {});

/// Each ranker on the full data once, unweighted rank product.
EfsisResult run_function_perturbation(const LabeledMatrix& data, const PipelineConfig& config,
                                      const PipelineHooks& hooks = {});

RankedList run_single(const LabeledMatrix& data, Ranker ranker);
RankedList run_single(const LabeledMatrix& data, std::string_view ranker_name);

} // namespace efsis
