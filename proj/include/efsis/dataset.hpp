#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "efsis/rng.hpp"

namespace efsis {

/// Row-major samples x features matrix with a binary label per row
/// (1 = positive class). This is the type every ranker and classifier
/// consumes; it carries no names, so resampled rows may repeat.
class LabeledMatrix {
public:
    LabeledMatrix() = default;
    LabeledMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                  std::vector<std::uint8_t> labels);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double value(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
    std::span<const double> row(std::size_t r) const
    {
        return {values_.data() + r * cols_, cols_};
    }
    std::span<const double> values() const { return values_; }
    std::span<const std::uint8_t> labels() const { return labels_; }
    bool positive(std::size_t row) const { return labels_[row] != 0; }

    std::size_t count_positive() const;
    std::size_t count_negative() const { return rows_ - count_positive(); }

    /// Copies the given rows (repeats allowed) in order.
    LabeledMatrix select_rows(std::span<const std::size_t> rows) const;
    /// Copies the given columns in order.
    LabeledMatrix select_columns(std::span<const std::size_t> cols) const;

    friend bool operator==(const LabeledMatrix&, const LabeledMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> labels_;
};

/// A validated binary-class expression dataset.
///
/// Invariants (checked on construction): exactly two label values, each
/// present at least twice; all values finite; feature names and sample ids
/// unique. The positive class is the lexicographically larger label.
class Dataset {
public:
    Dataset(LabeledMatrix matrix, std::vector<std::string> feature_names,
            std::vector<std::string> sample_ids, std::array<std::string, 2> label_names);

    const LabeledMatrix& matrix() const { return matrix_; }
    std::size_t samples() const { return matrix_.rows(); }
    std::size_t features() const { return matrix_.cols(); }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<std::string>& sample_ids() const { return sample_ids_; }
    /// [0] = negative label, [1] = positive label.
    const std::array<std::string, 2>& label_names() const { return label_names_; }

private:
    LabeledMatrix matrix_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> sample_ids_;
    std::array<std::string, 2> label_names_;
};

struct LoadOptions {
    /// Features as rows, samples as columns, second row holds labels.
    bool transposed = false;
};

/// Reads delimited text (comma or tab, detected from the header line).
Dataset load_dataset(const std::string& path, const LoadOptions& options = {});
Dataset read_dataset(std::istream& in, const LoadOptions& options = {},
                     const std::string& source = "<stream>");
/// Writes the sample-per-row layout with 17 significant digits.
void write_dataset(std::ostream& out, const Dataset& dataset);

struct BootstrapSet {
    std::vector<std::size_t> sample_indices;
    std::size_t index = 0; // 1-based bootstrap number m
};

/// Draws rows() indices uniformly with replacement, redrawing the whole set
/// (up to 100 attempts) until both classes are present.
BootstrapSet bootstrap(const LabeledMatrix& data, std::size_t m, Rng& rng);

struct FoldSplit {
    std::vector<std::vector<std::size_t>> folds;

    std::size_t k() const { return folds.size(); }
    /// Every index not in fold j, ascending.
    std::vector<std::size_t> training_indices(std::size_t j) const;
};

/// Per-class shuffle, then round-robin assignment to k folds. The positive
/// class continues the round-robin where the negatives stopped so total fold
/// sizes also differ by at most one.
FoldSplit stratified_folds(std::span<const std::uint8_t> labels, std::size_t k, Rng& rng);

/// Per-feature z-score parameters (population standard deviation).
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale; // 0 for zero-variance features

    static Standardizer fit(const LabeledMatrix& train);
    LabeledMatrix apply(const LabeledMatrix& data) const;
};

/// Standardizes both matrices with statistics of `train`.
std::pair<LabeledMatrix, LabeledMatrix> standardize(const LabeledMatrix& train,
                                                    const LabeledMatrix& apply_to);

struct SyntheticDataset {
    Dataset dataset;
    std::vector<std::size_t> informative; // ground truth: 0..d_info-1
};

/// Balanced two-class Gaussian data; the first `informative` features are
/// shifted by `effect` in the positive class.
SyntheticDataset generate_synthetic(std::size_t samples, std::size_t features,
                                    std::size_t informative, double effect, Rng& rng);

} // namespace efsis
