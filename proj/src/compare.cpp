#include <algorithm>

#include "efsis/error.hpp"
#include "efsis/eval.hpp"

namespace efsis {
namespace {

/// Highest mean AUC, lower sd on ties, then earliest method.
std::optional<std::size_t> best_of(const std::vector<std::vector<EvalReport>>& reports,
                                   std::size_t q, const std::vector<std::size_t>& candidates)
{
    std::optional<std::size_t> best;
    for (std::size_t i : candidates) {
        if (!best) {
            best = i;
            continue;
        }
        const auto& a = reports[i][q];
        const auto& b = reports[*best][q];
        if (a.mean_auc > b.mean_auc || (a.mean_auc == b.mean_auc && a.sd_auc < b.sd_auc)) {
            best = i;
        }
    }
    return best;
}

std::optional<double> paired_p(const EvalReport& method, const EvalReport& reference,
                               std::string& note, const char* label)
{
    try {
        return wilcoxon_signed_rank(method.per_fold_auc, reference.per_fold_auc).p_value;
    } catch (const Error&) {
        if (!note.empty()) {
            note += "; ";
        }
        note += std::string("identical fold AUCs to ") + label + " (comparison skipped)";
        return std::nullopt;
    }
}

} // namespace

std::vector<ComparisonRow> comparison_rows(std::span<const SelectionMethod> methods,
                                           const std::vector<std::vector<EvalReport>>& reports)
{
    if (reports.size() != methods.size() || reports.empty()) {
        throw Error("comparison needs one report series per method");
    }
    const std::size_t n_pct = reports.front().size();
    std::vector<std::size_t> all, individual;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (reports[i].size() != n_pct) {
            throw Error("comparison report series have different lengths");
        }
        all.push_back(i);
        if (methods[i].kind == SelectionMethod::Kind::Single) {
            individual.push_back(i);
        }
    }

    std::vector<std::vector<ComparisonRow>> grid(methods.size(), std::vector<ComparisonRow>(n_pct));
    for (std::size_t q = 0; q < n_pct; ++q) {
        const std::size_t best = *best_of(reports, q, all);
        const auto best_ind = best_of(reports, q, individual);
        for (std::size_t i = 0; i < methods.size(); ++i) {
            const EvalReport& r = reports[i][q];
            ComparisonRow& row = grid[i][q];
            row.method = r.method;
            row.percent = r.percent;
            row.mean_auc = r.mean_auc;
            row.sd_auc = r.sd_auc;
            row.stability = r.stability.value;
            row.best = i == best;
            row.best_individual = best_ind && i == *best_ind;
            if (!row.best) {
                row.p_vs_best = paired_p(r, reports[best][q], row.note, "best");
                row.significantly_worse = row.p_vs_best && *row.p_vs_best < kSignificanceLevel
                    && r.mean_auc < reports[best][q].mean_auc;
            }
            if (best_ind && !row.best_individual) {
                const EvalReport& ref = reports[*best_ind][q];
                row.p_vs_best_individual = paired_p(r, ref, row.note, "best individual");
                row.significantly_worse_than_individual = row.p_vs_best_individual
                    && *row.p_vs_best_individual < kSignificanceLevel && r.mean_auc < ref.mean_auc;
            }
        }
    }
    std::vector<ComparisonRow> rows;
    for (auto& series : grid) {
        for (auto& row : series) {
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

Comparison compare_methods(const LabeledMatrix& data, std::span<const SelectionMethod> methods,
                           std::span<const double> percents, std::size_t k, std::uint64_t seed)
{
    if (methods.size() < 2) {
        throw Error("comparison needs at least two methods");
    }
    Comparison out;
    for (const auto& m : methods) {
        out.reports.push_back(cross_validate_sweep(data, m, percents, k, seed));
    }
    out.rows = comparison_rows(methods, out.reports);
    return out;
}

std::optional<WilcoxonResult> compare_stability(std::span<const EvalReport> first,
                                                std::span<const EvalReport> second)
{
    if (first.size() != second.size()) {
        throw Error("stability comparison needs one pair per percentage");
    }
    std::vector<double> a, b;
    for (std::size_t i = 0; i < first.size(); ++i) {
        a.push_back(first[i].stability.value);
        b.push_back(second[i].stability.value);
    }
    try {
        return wilcoxon_signed_rank(a, b);
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace efsis
