#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "efsis/aggregate.hpp"
#include "efsis/dataset.hpp"
#include "efsis/error.hpp"
#include "efsis/eval.hpp"
#include "efsis/pipeline.hpp"
#include "efsis/rankers.hpp"

namespace py = pybind11;
using namespace efsis;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

// X is samples x features; y holds 0/1 per sample.
LabeledMatrix to_matrix(const Matrix& x, const Labels& y)
{
    if (x.ndim() != 2) {
        throw Error("X must be two-dimensional (samples x features)");
    }
    if (y.ndim() != 1 || y.shape(0) != x.shape(0)) {
        throw Error("y must be one-dimensional with one label per row of X");
    }
    const auto rows = static_cast<std::size_t>(x.shape(0));
    const auto cols = static_cast<std::size_t>(x.shape(1));
    std::vector<double> values(x.data(), x.data() + rows * cols);
    std::vector<std::uint8_t> labels(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto v = y.data()[i];
        if (v != 0 && v != 1) {
            throw Error("y must contain only 0 and 1");
        }
        labels[i] = static_cast<std::uint8_t>(v);
    }
    return LabeledMatrix(rows, cols, std::move(values), std::move(labels));
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v)
{
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<std::int64_t> ranks_array(const RankedList& l)
{
    return to_array(std::vector<std::int64_t>(l.ranks.begin(), l.ranks.end()));
}

py::array_t<std::int64_t> members_array(const FeatureSubset& s)
{
    return to_array(std::vector<std::int64_t>(s.members.begin(), s.members.end()));
}

RankedList list_from(const std::vector<std::size_t>& ranks)
{
    RankedList l;
    l.ranks = ranks;
    l.scores.assign(ranks.size(), 0.0);
    if (!is_permutation_ranking(l.ranks)) {
        throw Error("each rank list must be a permutation of 1..d");
    }
    return l;
}

PipelineConfig make_config(double percent, std::size_t bootstraps, std::uint64_t seed,
                           const std::optional<std::vector<std::string>>& rankers,
                           const std::string& weight_mode, std::size_t jobs)
{
    PipelineConfig cfg;
    cfg.percent = percent;
    cfg.bootstraps = bootstraps;
    cfg.seed = seed;
    cfg.weight_mode = parse_weight_mode(weight_mode);
    cfg.parallelism = jobs;
    if (rankers) {
        cfg.rankers.clear();
        for (const auto& name : *rankers) {
            cfg.rankers.push_back(parse_ranker(name));
        }
    }
    return cfg;
}

py::dict result_dict(const EfsisResult& r)
{
    py::dict d;
    d["ranks"] = ranks_array(r.final_list);
    d["selected"] = members_array(r.selected);
    d["t"] = r.t;
    py::list names;
    py::list lists;
    py::list stab;
    for (std::size_t n = 0; n < r.rankers.size(); ++n) {
        names.append(std::string(ranker_name(r.rankers[n])));
        lists.append(ranks_array(r.per_ranker_lists[n]));
        if (!r.per_ranker_stabilities.empty()) {
            stab.append(r.per_ranker_stabilities[n].value);
        }
    }
    d["rankers"] = names;
    d["per_ranker_ranks"] = lists;
    d["stabilities"] = r.per_ranker_stabilities.empty() ? py::object(py::none()) : py::object(stab);
    return d;
}

py::dict report_dict(const EvalReport& r)
{
    py::dict d;
    d["method"] = r.method;
    d["percent"] = r.percent;
    d["t"] = r.t;
    d["folds"] = r.k;
    d["seed"] = r.seed;
    d["per_fold_auc"] = to_array(r.per_fold_auc);
    d["mean_auc"] = r.mean_auc;
    d["sd_auc"] = r.sd_auc;
    d["stability"] = r.stability.value;
    py::list subsets;
    for (const auto& s : r.fold_subsets) {
        subsets.append(members_array(s));
    }
    d["selected_per_fold"] = subsets;
    return d;
}

} // namespace

PYBIND11_MODULE(efsis, m)
{
    m.doc() = "Ensemble feature selection integrating stability";
    m.attr("__version__") = EFSIS_VERSION;

    py::register_exception<Error>(m, "EfsisError", PyExc_ValueError);

    m.def(
        "load_dataset",
        [](const std::string& path, bool transposed) {
            const auto ds = load_dataset(path, LoadOptions{transposed});
            const auto& mat = ds.matrix();
            Matrix x({mat.rows(), mat.cols()});
            std::copy(mat.values().begin(), mat.values().end(), x.mutable_data());
            std::vector<std::int64_t> y(mat.labels().begin(), mat.labels().end());
            py::dict d;
            d["X"] = x;
            d["y"] = to_array(y);
            d["feature_names"] = ds.feature_names();
            d["sample_ids"] = ds.sample_ids();
            d["label_names"] = std::vector<std::string>(ds.label_names().begin(), ds.label_names().end());
            return d;
        },
        py::arg("path"), py::arg("transposed") = false,
        "Read a delimited dataset. y is 1 for the lexicographically larger label.");

    m.def(
        "synthetic",
        [](std::size_t samples, std::size_t features, std::size_t informative, double effect,
           std::uint64_t seed) {
            Rng rng(seed);
            const auto s = generate_synthetic(samples, features, informative, effect, rng);
            const auto& mat = s.dataset.matrix();
            Matrix x({mat.rows(), mat.cols()});
            std::copy(mat.values().begin(), mat.values().end(), x.mutable_data());
            std::vector<std::int64_t> y(mat.labels().begin(), mat.labels().end());
            return py::make_tuple(x, to_array(y),
                                  to_array(std::vector<std::int64_t>(s.informative.begin(),
                                                                     s.informative.end())));
        },
        py::arg("samples") = 60, py::arg("features") = 2000, py::arg("informative") = 50,
        py::arg("effect") = 1.5, py::arg("seed") = 1, "Returns (X, y, informative).");

    m.def(
        "rank",
        [](const Matrix& x, const Labels& y, const std::string& ranker) {
            const auto l = run_single(to_matrix(x, y), ranker);
            return py::make_tuple(ranks_array(l), to_array(l.scores));
        },
        py::arg("X"), py::arg("y"), py::arg("ranker"),
        "Rank features with one filter. Returns (ranks, scores); rank 1 is best.");

    m.def(
        "stability",
        [](const std::vector<std::vector<std::size_t>>& subsets) {
            std::vector<FeatureSubset> s;
            for (auto members : subsets) {
                std::sort(members.begin(), members.end());
                s.push_back({std::move(members)});
            }
            return efsis::stability(s).value;
        },
        py::arg("subsets"));

    m.def(
        "rank_product",
        [](const std::vector<std::vector<std::size_t>>& lists) {
            std::vector<RankedList> ls;
            for (const auto& r : lists) {
                ls.push_back(list_from(r));
            }
            return ranks_array(finalize(efsis::rank_product(ls)));
        },
        py::arg("rank_lists"));

    m.def(
        "weighted_rank_product",
        [](const std::vector<std::vector<std::size_t>>& lists, const std::vector<double>& stabilities,
           const std::string& weight_mode) {
            std::vector<RankedList> ls;
            for (const auto& r : lists) {
                ls.push_back(list_from(r));
            }
            return ranks_array(finalize(
                efsis::weighted_rank_product(ls, stabilities, parse_weight_mode(weight_mode))));
        },
        py::arg("rank_lists"), py::arg("stabilities"), py::arg("weight_mode") = "paper");

    m.def("threshold_to_t", &threshold_to_t, py::arg("percent"), py::arg("features"));

    m.def(
        "run_efsis",
        [](const Matrix& x, const Labels& y, double percent, std::size_t bootstraps,
           std::uint64_t seed, const std::optional<std::vector<std::string>>& rankers,
           const std::string& weight_mode, std::size_t jobs) {
            const auto data = to_matrix(x, y);
            const auto cfg = make_config(percent, bootstraps, seed, rankers, weight_mode, jobs);
            py::gil_scoped_release release;
            auto r = efsis::run_efsis(data, cfg);
            py::gil_scoped_acquire acquire;
            return result_dict(r);
        },
        py::arg("X"), py::arg("y"), py::arg("percent") = 1.0, py::arg("bootstraps") = 50,
        py::arg("seed") = 1, py::arg("rankers") = py::none(), py::arg("weight_mode") = "paper",
        py::arg("jobs") = 1);

    m.def(
        "run_function_perturbation",
        [](const Matrix& x, const Labels& y, double percent,
           const std::optional<std::vector<std::string>>& rankers) {
            const auto data = to_matrix(x, y);
            const auto cfg = make_config(percent, 50, 1, rankers, "paper", 1);
            return result_dict(efsis::run_function_perturbation(data, cfg));
        },
        py::arg("X"), py::arg("y"), py::arg("percent") = 1.0, py::arg("rankers") = py::none());

    m.def(
        "cross_validate",
        [](const Matrix& x, const Labels& y, const std::string& method,
           const std::vector<double>& percents, std::size_t folds, std::uint64_t seed,
           std::size_t bootstraps, const std::string& weight_mode, std::size_t jobs) {
            const auto data = to_matrix(x, y);
            const auto cfg = make_config(1.0, bootstraps, seed, std::nullopt, weight_mode, jobs);
            const auto sm = SelectionMethod::parse(method, cfg);
            std::vector<EvalReport> reports;
            {
                py::gil_scoped_release release;
                reports = cross_validate_sweep(data, sm, percents, folds, seed);
            }
            py::list out;
            for (const auto& r : reports) {
                out.append(report_dict(r));
            }
            return out;
        },
        py::arg("X"), py::arg("y"), py::arg("method") = "efsis",
        py::arg("percents") = std::vector<double>{1.0}, py::arg("folds") = 10, py::arg("seed") = 1,
        py::arg("bootstraps") = 50, py::arg("weight_mode") = "paper", py::arg("jobs") = 1,
        "Stratified k-fold evaluation; one report dict per percentage.");

    m.def(
        "auc",
        [](const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
            return efsis::auc(scores, labels);
        },
        py::arg("scores"), py::arg("labels"));

    m.def(
        "wilcoxon",
        [](const std::vector<double>& first, const std::vector<double>& second) {
            const auto w = wilcoxon_signed_rank(first, second);
            py::dict d;
            d["p_value"] = w.p_value;
            d["w_plus"] = w.w_plus;
            d["n"] = w.n;
            d["exact"] = w.exact;
            return d;
        },
        py::arg("first"), py::arg("second"), "Two-sided paired signed-rank test.");
}
