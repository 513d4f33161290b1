#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "efsis/dataset.hpp"
#include "efsis/eval.hpp"
#include "efsis/pipeline.hpp"

namespace efsis::report {

/// %.17g: exact round trip for machine-readable files.
std::string format_exact(double v);
/// Fixed notation with `digits` decimals for human tables.
std::string format_fixed(double v, int digits);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

void write_ranking_csv(std::ostream& out, const RankedList& list,
                       const std::vector<std::string>& feature_names);
void write_selected(std::ostream& out, const FeatureSubset& subset, const RankedList& list,
                    const std::vector<std::string>& feature_names);
void write_fold_csv(std::ostream& out, const EvalReport& report);

struct BenchmarkRow {
    std::string dataset;
    ComparisonRow row;
};

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);
std::vector<BenchmarkRow> read_benchmark_csv(std::istream& in);
/// Table-2 style text: mean+-sd per method x percentage, with markers.
void write_benchmark_table(std::ostream& out, const std::vector<BenchmarkRow>& rows);

struct StabilityPoint {
    std::string method;
    double percent = 0.0;
    double stability = 0.0;

    friend bool operator==(const StabilityPoint&, const StabilityPoint&) = default;
};

void write_stability_csv(std::ostream& out, const std::vector<StabilityPoint>& points);
std::vector<StabilityPoint> read_stability_csv(std::istream& in);

/// Line chart: x = percentage, y = stability, one series per method.
void write_stability_chart(std::ostream& out, const std::string& title,
                           const std::vector<StabilityPoint>& points);

struct BoxGroup {
    std::string dataset;
    std::vector<double> first;  // e.g. FuncPert stabilities over percentages
    std::vector<double> second; // e.g. EFSIS stabilities
    std::optional<double> p_value;
};

/// Paired box plots per dataset with the Wilcoxon p-value above each pair.
void write_box_plot(std::ostream& out, const std::string& first_label,
                    const std::string& second_label, const std::vector<BoxGroup>& groups);

} // namespace efsis::report
