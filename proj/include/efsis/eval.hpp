#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efsis/aggregate.hpp"
#include "efsis/dataset.hpp"
#include "efsis/pipeline.hpp"
#include "efsis/rankers.hpp"

namespace efsis {

// ---------------------------------------------------------------------------
// Linear SVM
// ---------------------------------------------------------------------------

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    double C = 1.0;

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct SvmOptions {
    double C = 1.0;
    std::size_t max_epochs = 1000;
    double tolerance = 1e-4; // stop when the largest dual update is below this
};

/// L1-loss (hinge) soft-margin SVM solved by dual coordinate descent over the
/// samples in fixed order. The bias is learned as the weight of a constant
/// augmented feature of value 1.
LinearModel train_linear_svm(const LabeledMatrix& train, const SvmOptions& options = {});

/// w.x + b for every row.
std::vector<double> decision_values(const LinearModel& model, const LabeledMatrix& samples);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Mann-Whitney AUC with mid-ranks for tied scores.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct WilcoxonResult {
    double p_value = 1.0; // two-sided
    double w_plus = 0.0;  // sum of mid-ranks of positive differences
    std::size_t n = 0;    // nonzero differences
    bool exact = false;
};

/// Paired test on first[i] - second[i]. Zero differences are dropped, tied
/// magnitudes get mid-ranks; exact null distribution for n <= 25, otherwise a
/// normal approximation with continuity and tie correction.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> first, std::span<const double> second);
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct SelectionMethod {
    enum class Kind { Single, FunctionPerturbation, Efsis };

    Kind kind = Kind::Efsis;
    Ranker ranker = Ranker::Sam;   // Single only
    PipelineConfig pipeline;       // ensembles: rankers, bootstraps, weight mode, parallelism

    static SelectionMethod single(Ranker r);
    static SelectionMethod function_perturbation(PipelineConfig cfg = {});
    static SelectionMethod efsis(PipelineConfig cfg = {});
    /// sam, infogain, geode, relieff, funcpert, efsis
    static SelectionMethod parse(std::string_view name, const PipelineConfig& cfg = {});

    /// Display name: SAM, InfoGain, GeoDE, ReliefF, FuncPert, EFSIS.
    std::string name() const;
};

struct EvalReport {
    std::string method;
    double percent = 0.0;
    std::size_t t = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<double> per_fold_auc;
    double mean_auc = 0.0;
    double sd_auc = 0.0;
    StabilityScore stability;                 // over the K fold subsets
    std::vector<FeatureSubset> fold_subsets;  // selected on each training portion
    FoldSplit folds;
};

/// The fold split cross_validate uses for (labels, k, seed).
FoldSplit cv_folds(std::span<const std::uint8_t> labels, std::size_t k, std::uint64_t seed);

/// Stratified k-fold CV: selection, standardization and training see only
/// the training portion of each fold.
EvalReport cross_validate(const LabeledMatrix& data, const SelectionMethod& method, double percent,
                          std::size_t k, std::uint64_t seed);

/// Same folds and rankings reused for every percentage.
std::vector<EvalReport> cross_validate_sweep(const LabeledMatrix& data,
                                             const SelectionMethod& method,
                                             std::span<const double> percents, std::size_t k,
                                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Method comparison
// ---------------------------------------------------------------------------

struct ComparisonRow {
    std::string method;
    double percent = 0.0;
    double mean_auc = 0.0;
    double sd_auc = 0.0;
    double stability = 0.0;
    bool best = false;                        // best mean AUC (lower sd breaks ties)
    std::optional<double> p_vs_best;          // empty for the best row or all-zero differences
    bool significantly_worse = false;
    bool best_individual = false;             // best among single rankers
    std::optional<double> p_vs_best_individual;
    bool significantly_worse_than_individual = false;
    std::string note;
};

struct Comparison {
    std::vector<ComparisonRow> rows;            // method-major, then percentage
    std::vector<std::vector<EvalReport>> reports; // [method][percent]
};

inline constexpr double kSignificanceLevel = 0.05;

Comparison compare_methods(const LabeledMatrix& data, std::span<const SelectionMethod> methods,
                           std::span<const double> percents, std::size_t k, std::uint64_t seed);

/// Builds the comparison table from precomputed reports ([method][percent]).
std::vector<ComparisonRow> comparison_rows(std::span<const SelectionMethod> methods,
                                           const std::vector<std::vector<EvalReport>>& reports);

/// Paired Wilcoxon on stability across percentages (one pair per percentage).
std::optional<WilcoxonResult> compare_stability(std::span<const EvalReport> first,
                                                std::span<const EvalReport> second);

} // namespace efsis
