#include <algorithm>
#include <cctype>
#include <string>

#include "efsis/error.hpp"
#include "efsis/eval.hpp"
#include "efsis/parallel.hpp"

namespace efsis {

SelectionMethod SelectionMethod::single(Ranker r)
{
    SelectionMethod m;
    m.kind = Kind::Single;
    m.ranker = r;
    m.pipeline.rankers = {r};
    return m;
}

SelectionMethod SelectionMethod::function_perturbation(PipelineConfig cfg)
{
    SelectionMethod m;
    m.kind = Kind::FunctionPerturbation;
    m.pipeline = std::move(cfg);
    return m;
}

SelectionMethod SelectionMethod::efsis(PipelineConfig cfg)
{
    SelectionMethod m;
    m.kind = Kind::Efsis;
    m.pipeline = std::move(cfg);
    return m;
}

SelectionMethod SelectionMethod::parse(std::string_view name, const PipelineConfig& cfg)
{
    std::string lower;
    for (char c : name) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (lower == "efsis") return efsis(cfg);
    if (lower == "funcpert" || lower == "func_pert") return function_perturbation(cfg);
    SelectionMethod m = single(parse_ranker(name));
    m.pipeline.parallelism = cfg.parallelism;
    return m;
}

std::string SelectionMethod::name() const
{
    switch (kind) {
    case Kind::Single: return std::string(ranker_name(ranker));
    case Kind::FunctionPerturbation: return "FuncPert";
    case Kind::Efsis: return "EFSIS";
    }
    return "?";
}

FoldSplit cv_folds(std::span<const std::uint8_t> labels, std::size_t k, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, "folds", k));
    return stratified_folds(labels, k, rng);
}

namespace {

double fold_auc(const LabeledMatrix& train, const LabeledMatrix& test, const FeatureSubset& subset)
{
    const auto [train_std, test_std] = standardize(train.select_columns(subset.members),
                                                   test.select_columns(subset.members));
    const LinearModel model = train_linear_svm(train_std);
    return auc(decision_values(model, test_std), test_std.labels());
}

/// Ranked lists chosen on one training portion, one per percentage.
std::vector<RankedList> select_on_training(const LabeledMatrix& train,
                                           const SelectionMethod& method,
                                           const std::vector<std::size_t>& thresholds,
                                           std::uint64_t fold_seed)
{
    switch (method.kind) {
    case SelectionMethod::Kind::Single:
        return std::vector<RankedList>(thresholds.size(), rank_features(train, method.ranker));
    case SelectionMethod::Kind::FunctionPerturbation:
        return std::vector<RankedList>(thresholds.size(),
                                       run_function_perturbation(train, method.pipeline).final_list);
    case SelectionMethod::Kind::Efsis: {
        PipelineConfig cfg = method.pipeline;
        cfg.seed = fold_seed;
        const BootstrapGrid grid = compute_bootstrap_grid(train, cfg);
        std::vector<RankedList> out;
        for (std::size_t t : thresholds) {
            out.push_back(assemble_efsis(grid, t, cfg.weight_mode).final_list);
        }
        return out;
    }
    }
    throw Error("unknown selection method");
}

} // namespace

std::vector<EvalReport> cross_validate_sweep(const LabeledMatrix& data,
                                             const SelectionMethod& method,
                                             std::span<const double> percents, std::size_t k,
                                             std::uint64_t seed)
{
    if (percents.empty()) {
        throw Error("cross-validation needs at least one percentage");
    }
    std::vector<std::size_t> thresholds;
    for (double pct : percents) {
        thresholds.push_back(threshold_to_t(pct, data.cols()));
    }
    const FoldSplit folds = cv_folds(data.labels(), k, seed);

    // [fold][percent]
    std::vector<std::vector<double>> aucs(k);
    std::vector<std::vector<FeatureSubset>> subsets(k);
    auto run_fold = [&](std::size_t j) {
        try {
            const auto train_idx = folds.training_indices(j);
            const LabeledMatrix train = data.select_rows(train_idx);
            const LabeledMatrix test = data.select_rows(folds.folds[j]);
            const auto lists = select_on_training(train, method, thresholds,
                                                  derive_seed(seed, "fold", j));
            for (std::size_t q = 0; q < thresholds.size(); ++q) {
                subsets[j].push_back(top_t(lists[q], thresholds[q]));
                aucs[j].push_back(fold_auc(train, test, subsets[j].back()));
            }
        } catch (const std::exception& e) {
            throw Error("fold " + std::to_string(j + 1) + " of " + std::to_string(k) + ": "
                        + e.what());
        }
    };
    // Ensembles parallelize internally; single rankers across folds.
    const std::size_t fold_workers =
        method.kind == SelectionMethod::Kind::Single ? method.pipeline.parallelism : 1;
    parallel_for(k, fold_workers, run_fold);

    std::vector<EvalReport> reports;
    for (std::size_t q = 0; q < thresholds.size(); ++q) {
        EvalReport r;
        r.method = method.name();
        r.percent = percents[q];
        r.t = thresholds[q];
        r.k = k;
        r.seed = seed;
        for (std::size_t j = 0; j < k; ++j) {
            r.per_fold_auc.push_back(aucs[j][q]);
            r.fold_subsets.push_back(subsets[j][q]);
        }
        r.mean_auc = mean(r.per_fold_auc);
        r.sd_auc = sample_sd(r.per_fold_auc);
        r.stability = stability(r.fold_subsets);
        r.folds = folds;
        reports.push_back(std::move(r));
    }
    return reports;
}

EvalReport cross_validate(const LabeledMatrix& data, const SelectionMethod& method, double percent,
                          std::size_t k, std::uint64_t seed)
{
    const double pct[] = {percent};
    return std::move(cross_validate_sweep(data, method, pct, k, seed).front());
}

} // namespace efsis
