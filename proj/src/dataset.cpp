#include "efsis/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

#include "efsis/error.hpp"

namespace efsis {

LabeledMatrix::LabeledMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                             std::vector<std::uint8_t> labels)
    : rows_(rows), cols_(cols), values_(std::move(values)), labels_(std::move(labels))
{
    if (values_.size() != rows_ * cols_) {
        throw Error("matrix value count does not match " + std::to_string(rows_) + "x"
                    + std::to_string(cols_));
    }
    if (labels_.size() != rows_) {
        throw Error("label count does not match row count");
    }
}

std::size_t LabeledMatrix::count_positive() const
{
    return static_cast<std::size_t>(std::count_if(labels_.begin(), labels_.end(),
                                                  [](std::uint8_t y) { return y != 0; }));
}

LabeledMatrix LabeledMatrix::select_rows(std::span<const std::size_t> rows) const
{
    std::vector<double> values;
    values.reserve(rows.size() * cols_);
    std::vector<std::uint8_t> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= rows_) {
            throw Error("row index out of range");
        }
        auto src = row(r);
        values.insert(values.end(), src.begin(), src.end());
        labels.push_back(labels_[r]);
    }
    return {rows.size(), cols_, std::move(values), std::move(labels)};
}

LabeledMatrix LabeledMatrix::select_columns(std::span<const std::size_t> cols) const
{
    for (std::size_t c : cols) {
        if (c >= cols_) {
            throw Error("column index out of range");
        }
    }
    std::vector<double> values;
    values.reserve(rows_ * cols.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c : cols) {
            values.push_back(value(r, c));
        }
    }
    return {rows_, cols.size(), std::move(values), labels_};
}

Dataset::Dataset(LabeledMatrix matrix, std::vector<std::string> feature_names,
                 std::vector<std::string> sample_ids, std::array<std::string, 2> label_names)
    : matrix_(std::move(matrix)),
      feature_names_(std::move(feature_names)),
      sample_ids_(std::move(sample_ids)),
      label_names_(std::move(label_names))
{
    if (feature_names_.size() != matrix_.cols()) {
        throw Error("feature name count does not match feature count");
    }
    if (sample_ids_.size() != matrix_.rows()) {
        throw Error("sample id count does not match sample count");
    }
    if (!(label_names_[0] < label_names_[1])) {
        throw Error("label names must be two distinct values in lexicographic order");
    }
    auto check_unique = [](const std::vector<std::string>& names, const char* what) {
        std::set<std::string_view> seen;
        for (const auto& n : names) {
            if (!seen.insert(n).second) {
                throw Error(std::string("duplicate ") + what + " '" + n + "'");
            }
        }
    };
    check_unique(feature_names_, "feature name");
    check_unique(sample_ids_, "sample id");

    for (std::size_t r = 0; r < matrix_.rows(); ++r) {
        for (std::size_t c = 0; c < matrix_.cols(); ++c) {
            if (!std::isfinite(matrix_.value(r, c))) {
                throw Error("non-finite value at sample '" + sample_ids_[r] + "', feature '"
                            + feature_names_[c] + "'");
            }
        }
    }
    const std::size_t pos = matrix_.count_positive();
    const std::size_t neg = matrix_.rows() - pos;
    if (pos < 2 || neg < 2) {
        throw Error("each class needs at least two samples (found " + std::to_string(neg) + " '"
                    + label_names_[0] + "', " + std::to_string(pos) + " '" + label_names_[1]
                    + "')");
    }
}

namespace {

std::vector<std::string> split(const std::string& line, char delim)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(delim, start);
        std::string cell = line.substr(start, end == std::string::npos ? end : end - start);
        // trim surrounding whitespace
        auto first = cell.find_first_not_of(" \t\r\"");
        auto last = cell.find_last_not_of(" \t\r\"");
        cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
        if (end == std::string::npos) {
            break;
        }
        start = end + 1;
    }
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col_no,
                  const std::string& source)
{
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (!cell.empty() && *begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (cell.empty() || ec != std::errc() || ptr != end) {
        throw Error(source + ": cannot parse '" + cell + "' as a number at line "
                    + std::to_string(line_no) + ", column " + std::to_string(col_no));
    }
    if (!std::isfinite(v)) {
        throw Error(source + ": non-finite value '" + cell + "' at line "
                    + std::to_string(line_no) + ", column " + std::to_string(col_no));
    }
    return v;
}

std::array<std::string, 2> binary_labels(const std::vector<std::string>& raw,
                                         const std::string& source)
{
    std::set<std::string> distinct(raw.begin(), raw.end());
    if (distinct.size() != 2) {
        throw Error(source + ": labels are not binary (found " + std::to_string(distinct.size())
                    + " distinct values)");
    }
    return {*distinct.begin(), *std::next(distinct.begin())};
}

std::vector<std::uint8_t> encode_labels(const std::vector<std::string>& raw,
                                        const std::array<std::string, 2>& names)
{
    std::vector<std::uint8_t> y;
    y.reserve(raw.size());
    for (const auto& l : raw) {
        y.push_back(l == names[1] ? 1 : 0);
    }
    return y;
}

} // namespace

Dataset read_dataset(std::istream& in, const LoadOptions& options, const std::string& source)
{
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        lines.push_back(std::move(line));
    }
    if (lines.empty()) {
        throw Error(source + ": empty input");
    }
    const char delim = lines.front().find('\t') != std::string::npos ? '\t' : ',';
    auto header = split(lines.front(), delim);

    if (!options.transposed) {
        if (header.size() < 3) {
            throw Error(source + ": header needs sample_id, label and at least one feature");
        }
        std::vector<std::string> features(header.begin() + 2, header.end());
        const std::size_t d = features.size();
        std::vector<std::string> ids;
        std::vector<std::string> raw_labels;
        std::vector<double> values;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            auto cells = split(lines[i], delim);
            if (cells.size() != d + 2) {
                throw Error(source + ": line " + std::to_string(i + 1) + " has "
                            + std::to_string(cells.size()) + " cells, expected "
                            + std::to_string(d + 2));
            }
            ids.push_back(cells[0]);
            raw_labels.push_back(cells[1]);
            for (std::size_t c = 0; c < d; ++c) {
                values.push_back(parse_cell(cells[c + 2], i + 1, c + 3, source));
            }
        }
        auto names = binary_labels(raw_labels, source);
        LabeledMatrix m(ids.size(), d, std::move(values), encode_labels(raw_labels, names));
        return {std::move(m), std::move(features), std::move(ids), std::move(names)};
    }

    if (lines.size() < 3) {
        throw Error(source + ": transposed layout needs header, label row and feature rows");
    }
    if (header.size() < 2) {
        throw Error(source + ": header needs at least one sample column");
    }
    std::vector<std::string> ids(header.begin() + 1, header.end());
    const std::size_t p = ids.size();
    auto label_row = split(lines[1], delim);
    if (label_row.size() != p + 1) {
        throw Error(source + ": label row has " + std::to_string(label_row.size())
                    + " cells, expected " + std::to_string(p + 1));
    }
    std::vector<std::string> raw_labels(label_row.begin() + 1, label_row.end());
    std::vector<std::string> features;
    std::vector<double> by_feature;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        auto cells = split(lines[i], delim);
        if (cells.size() != p + 1) {
            throw Error(source + ": line " + std::to_string(i + 1) + " has "
                        + std::to_string(cells.size()) + " cells, expected "
                        + std::to_string(p + 1));
        }
        features.push_back(cells[0]);
        for (std::size_t s = 0; s < p; ++s) {
            by_feature.push_back(parse_cell(cells[s + 1], i + 1, s + 2, source));
        }
    }
    const std::size_t d = features.size();
    std::vector<double> values(p * d);
    for (std::size_t f = 0; f < d; ++f) {
        for (std::size_t s = 0; s < p; ++s) {
            values[s * d + f] = by_feature[f * p + s];
        }
    }
    auto names = binary_labels(raw_labels, source);
    LabeledMatrix m(p, d, std::move(values), encode_labels(raw_labels, names));
    return {std::move(m), std::move(features), std::move(ids), std::move(names)};
}

Dataset load_dataset(const std::string& path, const LoadOptions& options)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return read_dataset(in, options, path);
}

void write_dataset(std::ostream& out, const Dataset& dataset)
{
    out << "sample_id,label";
    for (const auto& f : dataset.feature_names()) {
        out << ',' << f;
    }
    out << '\n';
    char buf[32];
    const auto& m = dataset.matrix();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << dataset.sample_ids()[r] << ',' << dataset.label_names()[m.positive(r) ? 1 : 0];
        for (double v : m.row(r)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

BootstrapSet bootstrap(const LabeledMatrix& data, std::size_t m, Rng& rng)
{
    const std::size_t p = data.rows();
    if (p == 0 || data.count_positive() == 0 || data.count_negative() == 0) {
        throw Error("bootstrap requires both classes in the source data");
    }
    BootstrapSet set;
    set.index = m;
    set.sample_indices.resize(p);
    for (int attempt = 0; attempt < 100; ++attempt) {
        bool has_pos = false;
        bool has_neg = false;
        for (auto& idx : set.sample_indices) {
            idx = uniform_index(rng, p);
            (data.positive(idx) ? has_pos : has_neg) = true;
        }
        if (has_pos && has_neg) {
            return set;
        }
    }
    throw Error("bootstrap " + std::to_string(m)
                + ": 100 redraws all missed a class; dataset too degenerate to resample");
}

std::vector<std::size_t> FoldSplit::training_indices(std::size_t j) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < folds.size(); ++i) {
        if (i != j) {
            out.insert(out.end(), folds[i].begin(), folds[i].end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

FoldSplit stratified_folds(std::span<const std::uint8_t> labels, std::size_t k, Rng& rng)
{
    if (k < 2) {
        throw Error("need at least two folds");
    }
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i] != 0 ? 1 : 0].push_back(i);
    }
    for (std::size_t c = 0; c < 2; ++c) {
        if (by_class[c].size() < k) {
            throw Error("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size())
                        + " samples, fewer than " + std::to_string(k) + " folds");
        }
    }
    FoldSplit split;
    split.folds.resize(k);
    std::size_t next = 0;
    for (auto& members : by_class) {
        // Fisher-Yates
        for (std::size_t i = members.size(); i > 1; --i) {
            std::swap(members[i - 1], members[uniform_index(rng, i)]);
        }
        for (std::size_t idx : members) {
            split.folds[next].push_back(idx);
            next = (next + 1) % k;
        }
    }
    for (auto& f : split.folds) {
        std::sort(f.begin(), f.end());
    }
    return split;
}

Standardizer Standardizer::fit(const LabeledMatrix& train)
{
    if (train.rows() == 0) {
        throw Error("cannot standardize with an empty training set");
    }
    const std::size_t d = train.cols();
    const double n = static_cast<double>(train.rows());
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 0.0);
    for (std::size_t r = 0; r < train.rows(); ++r) {
        auto row = train.row(r);
        for (std::size_t f = 0; f < d; ++f) {
            s.mean[f] += row[f];
        }
    }
    for (auto& m : s.mean) {
        m /= n;
    }
    for (std::size_t r = 0; r < train.rows(); ++r) {
        auto row = train.row(r);
        for (std::size_t f = 0; f < d; ++f) {
            const double c = row[f] - s.mean[f];
            s.scale[f] += c * c;
        }
    }
    for (std::size_t f = 0; f < d; ++f) {
        const double sd = std::sqrt(s.scale[f] / n);
        s.scale[f] = sd > 0.0 ? 1.0 / sd : 0.0;
    }
    return s;
}

LabeledMatrix Standardizer::apply(const LabeledMatrix& data) const
{
    if (data.cols() != mean.size()) {
        throw Error("standardizer feature count mismatch");
    }
    std::vector<double> values(data.values().begin(), data.values().end());
    const std::size_t d = data.cols();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t f = i % d;
        values[i] = scale[f] == 0.0 ? 0.0 : (values[i] - mean[f]) * scale[f];
    }
    return {data.rows(), d, std::move(values),
            std::vector<std::uint8_t>(data.labels().begin(), data.labels().end())};
}

std::pair<LabeledMatrix, LabeledMatrix> standardize(const LabeledMatrix& train,
                                                    const LabeledMatrix& apply_to)
{
    auto s = Standardizer::fit(train);
    return {s.apply(train), s.apply(apply_to)};
}

SyntheticDataset generate_synthetic(std::size_t samples, std::size_t features,
                                    std::size_t informative, double effect, Rng& rng)
{
    if (samples % 2 != 0 || samples < 4) {
        throw Error("synthetic sample count must be even and at least 4");
    }
    if (features == 0 || informative > features) {
        throw Error("informative feature count must not exceed feature count");
    }
    if (!(effect >= 0.0) || !std::isfinite(effect)) {
        throw Error("effect must be a finite non-negative number");
    }
    std::vector<double> values(samples * features);
    std::vector<std::uint8_t> labels(samples);
    for (std::size_t r = 0; r < samples; ++r) {
        labels[r] = r >= samples / 2 ? 1 : 0;
        for (std::size_t f = 0; f < features; ++f) {
            double v = standard_normal(rng);
            if (labels[r] != 0 && f < informative) {
                v += effect;
            }
            values[r * features + f] = v;
        }
    }
    auto width = [](std::size_t n) { return std::to_string(n > 0 ? n - 1 : 0).size(); };
    auto name = [](char prefix, std::size_t i, std::size_t w) {
        std::string s = std::to_string(i);
        return std::string(1, prefix) + std::string(w - s.size(), '0') + s;
    };
    std::vector<std::string> feature_names;
    for (std::size_t f = 0; f < features; ++f) {
        feature_names.push_back(name('g', f, width(features)));
    }
    std::vector<std::string> ids;
    for (std::size_t r = 0; r < samples; ++r) {
        ids.push_back(name('s', r, width(samples)));
    }
    std::vector<std::size_t> truth(informative);
    std::iota(truth.begin(), truth.end(), std::size_t{0});
    return {Dataset(LabeledMatrix(samples, features, std::move(values), std::move(labels)),
                    std::move(feature_names), std::move(ids), {"neg", "pos"}),
            std::move(truth)};
}

} // namespace efsis
