#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "efsis/error.hpp"
#include "efsis/eval.hpp"
#include "efsis/pipeline.hpp"
#include "report.hpp"

#ifndef EFSIS_VERSION
#define EFSIS_VERSION "0.0.0"
#endif

namespace efsis::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Bad flag values detected after parsing; mapped to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string> kMethods{"sam", "infogain", "geode", "relieff", "funcpert", "efsis"};
const std::vector<double> kDefaultSweep{0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};

struct Options {
    std::vector<std::string> inputs;
    bool transpose = false;
    std::vector<std::string> methods;
    double percent = 1.0;
    std::vector<double> percent_list;
    std::size_t bootstraps = 50;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::string weight_mode = "paper";
    std::string out_dir = "efsis_out";
    bool progress = false;

    // synth
    std::size_t samples = 60;
    std::size_t features = 2000;
    std::size_t informative = 50;
    double effect = 1.5;
    std::string name = "synthetic";

    // replay
    std::string manifest;
};

std::string timestamp_utc()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    return out;
}

void write_json(const fs::path& path, const json& j)
{
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void check_common(const Options& o)
{
    if (!(o.percent > 0.0 && o.percent <= 100.0)) {
        throw UsageError("--percent must be in (0, 100]");
    }
    if (o.bootstraps < 2) {
        throw UsageError("--bootstraps must be at least 2");
    }
    if (o.folds < 2) {
        throw UsageError("--folds must be at least 2");
    }
    if (o.jobs < 1) {
        throw UsageError("--jobs must be at least 1");
    }
}

PipelineConfig pipeline_config(const Options& o)
{
    PipelineConfig cfg;
    cfg.bootstraps = o.bootstraps;
    cfg.percent = o.percent;
    cfg.seed = o.seed;
    cfg.weight_mode = parse_weight_mode(o.weight_mode);
    cfg.parallelism = o.jobs;
    return cfg;
}

std::string lower(std::string s)
{
    for (auto& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

/// Flags that reproduce this run; out-dir last so replay can swap it.
std::vector<std::string> canonical_argv(const std::string& command, const Options& o)
{
    std::vector<std::string> a{command};
    auto add = [&](const std::string& flag, const std::string& value) {
        a.push_back(flag);
        a.push_back(value);
    };
    if (command == "synth") {
        add("--samples", std::to_string(o.samples));
        add("--features", std::to_string(o.features));
        add("--informative", std::to_string(o.informative));
        add("--effect", report::format_exact(o.effect));
        add("--seed", std::to_string(o.seed));
        add("--name", o.name);
        add("--out-dir", o.out_dir);
        return a;
    }
    for (const auto& in : o.inputs) {
        add("--input", in);
    }
    if (o.transpose) {
        a.push_back("--transpose");
    }
    if (command == "benchmark") {
        for (const auto& m : o.methods) {
            add("--method", m);
        }
        for (double p : o.percent_list) {
            add("--percent-list", report::format_exact(p));
        }
    } else {
        add("--method", o.methods.front());
        add("--percent", report::format_exact(o.percent));
    }
    add("--bootstraps", std::to_string(o.bootstraps));
    if (command != "rank") {
        add("--folds", std::to_string(o.folds));
    }
    add("--seed", std::to_string(o.seed));
    add("--jobs", std::to_string(o.jobs));
    add("--weight-mode", o.weight_mode);
    add("--out-dir", o.out_dir);
    return a;
}

json make_manifest(const std::string& command, const Options& o,
                   const std::vector<std::string>& outputs)
{
    json inputs = json::array();
    for (const auto& in : o.inputs) {
        // A benchmark input that could not be read is recorded without a digest.
        json digest = nullptr;
        if (std::filesystem::is_regular_file(in)) {
            digest = "fnv1a64:" + report::file_digest(in);
        }
        inputs.push_back({{"path", in}, {"digest", digest}});
    }
    json config = {{"seed", o.seed}};
    if (command == "synth") {
        config["samples"] = o.samples;
        config["features"] = o.features;
        config["informative"] = o.informative;
        config["effect"] = o.effect;
    } else {
        config["transpose"] = o.transpose;
        config["methods"] = o.methods;
        if (command == "benchmark") {
            config["percent_list"] = o.percent_list;
        } else {
            config["percent"] = o.percent;
        }
        config["bootstraps"] = o.bootstraps;
        if (command != "rank") {
            config["folds"] = o.folds;
        }
        config["jobs"] = o.jobs;
        config["weight_mode"] = o.weight_mode;
    }
    return {{"tool", "efsis"},
            {"version", EFSIS_VERSION},
            {"command", command},
            {"argv", canonical_argv(command, o)},
            {"config", config},
            {"inputs", inputs},
            {"outputs", outputs},
            {"timestamp", timestamp_utc()}};
}

Dataset load_input(const std::string& path, bool transpose)
{
    LoadOptions lo;
    lo.transposed = transpose;
    return load_dataset(path, lo);
}

int cmd_rank(const Options& o, std::ostream& out, std::ostream& err)
{
    check_common(o);
    const Dataset ds = load_input(o.inputs.front(), o.transpose);
    const std::string method = lower(o.methods.front());
    PipelineConfig cfg = pipeline_config(o);
    PipelineHooks hooks;
    if (o.progress) {
        hooks.progress = [&err](std::size_t done, std::size_t total) {
            err << "\rranker tasks " << done << '/' << total << (done == total ? "\n" : "")
                << std::flush;
        };
    }

    RankedList list;
    FeatureSubset selected;
    json stab = {{"method", method}};
    const std::size_t t = threshold_to_t(o.percent, ds.features());
    if (method == "efsis" || method == "funcpert") {
        const EfsisResult r = method == "efsis" ? run_efsis(ds.matrix(), cfg, hooks)
                                                : run_function_perturbation(ds.matrix(), cfg, hooks);
        list = r.final_list;
        selected = r.selected;
        json rankers = json::array();
        for (std::size_t n = 0; n < r.rankers.size(); ++n) {
            json entry = {{"ranker", std::string(ranker_name(r.rankers[n]))}};
            if (n < r.per_ranker_stabilities.size()) {
                entry["stability"] = r.per_ranker_stabilities[n].value;
                entry["subsets"] = r.per_ranker_stabilities[n].subsets;
            } else {
                entry["stability"] = nullptr;
            }
            rankers.push_back(entry);
        }
        stab["rankers"] = rankers;
    } else {
        list = run_single(ds.matrix(), method);
        selected = top_t(list, t);
        stab["rankers"] = json::array(
            {{{"ranker", std::string(ranker_name(parse_ranker(method)))}, {"stability", nullptr}}});
    }
    stab["percent"] = o.percent;
    stab["t"] = t;
    stab["weight_mode"] = o.weight_mode;

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    {
        auto f = open_output(dir / "ranking.csv");
        report::write_ranking_csv(f, list, ds.feature_names());
    }
    {
        auto f = open_output(dir / "selected.txt");
        report::write_selected(f, selected, list, ds.feature_names());
    }
    write_json(dir / "stability.json", stab);
    write_json(dir / "manifest.json",
               make_manifest("rank", o, {"ranking.csv", "selected.txt", "stability.json"}));
    out << "selected " << selected.size() << " of " << ds.features() << " features -> "
        << dir.string() << '\n';
    return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream&)
{
    check_common(o);
    const Dataset ds = load_input(o.inputs.front(), o.transpose);
    const SelectionMethod method = SelectionMethod::parse(o.methods.front(), pipeline_config(o));
    const EvalReport r = cross_validate(ds.matrix(), method, o.percent, o.folds, o.seed);

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    {
        auto f = open_output(dir / "folds.csv");
        report::write_fold_csv(f, r);
    }
    json subsets = json::array();
    for (const auto& s : r.fold_subsets) {
        json names = json::array();
        for (std::size_t fidx : s.members) {
            names.push_back(ds.feature_names()[fidx]);
        }
        subsets.push_back(names);
    }
    json summary = {{"method", r.method},        {"percent", r.percent},
                    {"t", r.t},                  {"folds", r.k},
                    {"seed", r.seed},            {"mean_auc", r.mean_auc},
                    {"sd_auc", r.sd_auc},        {"stability", r.stability.value},
                    {"per_fold_auc", r.per_fold_auc}, {"selected_per_fold", subsets}};
    write_json(dir / "summary.json", summary);
    write_json(dir / "manifest.json", make_manifest("evaluate", o, {"folds.csv", "summary.json"}));
    out << r.method << " at " << report::format_fixed(r.percent, 2)
        << "%: mean AUC " << report::format_fixed(r.mean_auc, 3) << " +- "
        << report::format_fixed(r.sd_auc, 3) << ", stability "
        << report::format_fixed(r.stability.value, 3) << '\n';
    return kExitOk;
}

std::string safe_name(std::string s)
{
    for (auto& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') {
            c = '_';
        }
    }
    return s;
}

int cmd_benchmark(Options o, std::ostream& out, std::ostream& err)
{
    check_common(o);
    if (o.methods.size() < 2) {
        throw UsageError("benchmark needs at least two methods");
    }
    for (double p : o.percent_list) {
        if (!(p > 0.0 && p <= 100.0)) {
            throw UsageError("--percent-list values must be in (0, 100]");
        }
    }
    std::vector<SelectionMethod> methods;
    const PipelineConfig cfg = pipeline_config(o);
    for (const auto& m : o.methods) {
        methods.push_back(SelectionMethod::parse(m, cfg));
    }
    auto find_method = [&](SelectionMethod::Kind kind) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < methods.size(); ++i) {
            if (methods[i].kind == kind) {
                return i;
            }
        }
        return std::nullopt;
    };
    const auto fp_idx = find_method(SelectionMethod::Kind::FunctionPerturbation);
    const auto ef_idx = find_method(SelectionMethod::Kind::Efsis);

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);

    std::vector<report::BenchmarkRow> rows;
    std::vector<report::BoxGroup> boxes;
    std::vector<std::string> outputs;
    json status = json::array();
    json stability_tests = json::array();
    std::set<std::string> used_names;
    std::size_t succeeded = 0;

    for (const auto& input : o.inputs) {
        std::string name = safe_name(fs::path(input).stem().string());
        for (int i = 2; used_names.count(name) != 0; ++i) {
            name = safe_name(fs::path(input).stem().string()) + "_" + std::to_string(i);
        }
        used_names.insert(name);
        try {
            const Dataset ds = load_input(input, o.transpose);
            err << "benchmark " << name << ": " << ds.samples() << " samples, " << ds.features()
                << " features\n";
            const Comparison cmp =
                compare_methods(ds.matrix(), methods, o.percent_list, o.folds, o.seed);
            for (const auto& r : cmp.rows) {
                rows.push_back({name, r});
            }

            std::vector<report::StabilityPoint> points;
            for (const auto& series : cmp.reports) {
                for (const auto& r : series) {
                    points.push_back({r.method, r.percent, r.stability.value});
                }
            }
            const std::string csv_name = "stability_" + name + ".csv";
            const std::string svg_name = "stability_" + name + ".svg";
            {
                auto f = open_output(dir / csv_name);
                report::write_stability_csv(f, points);
            }
            // The chart is drawn from the CSV as written, so both agree exactly.
            std::ifstream back(dir / csv_name);
            const auto parsed = report::read_stability_csv(back);
            {
                auto f = open_output(dir / svg_name);
                report::write_stability_chart(f, name + ": stability", parsed);
            }
            outputs.push_back(csv_name);
            outputs.push_back(svg_name);

            if (fp_idx && ef_idx) {
                report::BoxGroup box;
                box.dataset = name;
                for (const auto& r : cmp.reports[*fp_idx]) box.first.push_back(r.stability.value);
                for (const auto& r : cmp.reports[*ef_idx]) box.second.push_back(r.stability.value);
                const auto w = compare_stability(cmp.reports[*ef_idx], cmp.reports[*fp_idx]);
                json entry = {{"dataset", name}};
                if (w) {
                    box.p_value = w->p_value;
                    entry["n"] = w->n;
                    entry["w_plus"] = w->w_plus;
                    entry["p_value"] = w->p_value;
                    entry["exact"] = w->exact;
                } else {
                    entry["p_value"] = nullptr;
                    entry["note"] = "identical stabilities at every percentage";
                }
                stability_tests.push_back(entry);
                boxes.push_back(std::move(box));
            }
            status.push_back({{"dataset", name}, {"input", input}, {"status", "ok"}});
            ++succeeded;
        } catch (const std::exception& e) {
            err << "benchmark " << name << " failed: " << e.what() << '\n';
            status.push_back(
                {{"dataset", name}, {"input", input}, {"status", "failed"}, {"error", e.what()}});
        }
    }

    {
        auto f = open_output(dir / "benchmark.csv");
        report::write_benchmark_csv(f, rows);
    }
    {
        auto f = open_output(dir / "benchmark.txt");
        report::write_benchmark_table(f, rows);
    }
    outputs.insert(outputs.begin(), {"benchmark.csv", "benchmark.txt"});
    if (fp_idx && ef_idx) {
        auto f = open_output(dir / "stability_box.svg");
        report::write_box_plot(f, "FuncPert", "EFSIS", boxes);
        write_json(dir / "stability_tests.json", stability_tests);
        outputs.push_back("stability_box.svg");
        outputs.push_back("stability_tests.json");
    }
    write_json(dir / "status.json", status);
    outputs.push_back("status.json");
    write_json(dir / "manifest.json", make_manifest("benchmark", o, outputs));
    out << "benchmark: " << rows.size() << " rows from " << succeeded << " of " << o.inputs.size()
        << " datasets -> " << dir.string() << '\n';
    if (succeeded == 0) {
        throw Error("benchmark: no dataset could be processed (see status.json)");
    }
    return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out)
{
    if (o.informative > o.features) {
        throw UsageError("--informative must not exceed --features");
    }
    if (o.samples < 4 || o.samples % 2 != 0) {
        throw UsageError("--samples must be even and at least 4");
    }
    if (!(o.effect >= 0.0)) {
        throw UsageError("--effect must be non-negative");
    }
    if (o.features == 0) {
        throw UsageError("--features must be positive");
    }
    Rng rng(o.seed);
    const SyntheticDataset syn =
        generate_synthetic(o.samples, o.features, o.informative, o.effect, rng);
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    const std::string data_name = o.name + ".csv";
    const std::string truth_name = o.name + "_informative.txt";
    {
        auto f = open_output(dir / data_name);
        write_dataset(f, syn.dataset);
    }
    {
        auto f = open_output(dir / truth_name);
        for (std::size_t fidx : syn.informative) {
            f << syn.dataset.feature_names()[fidx] << '\n';
        }
    }
    write_json(dir / (o.name + ".manifest.json"),
               make_manifest("synth", o, {data_name, truth_name}));
    out << "wrote " << (dir / data_name).string() << " and " << (dir / truth_name).string() << '\n';
    return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             int depth);

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err, int depth)
{
    if (depth > 0) {
        throw UsageError("a replayed manifest cannot itself be a replay");
    }
    std::ifstream in(o.manifest);
    if (!in) {
        throw Error("cannot open manifest '" + o.manifest + "'");
    }
    json m;
    try {
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("manifest '" + o.manifest + "' is not valid JSON: " + e.what());
    }
    if (!m.contains("argv") || !m["argv"].is_array()) {
        throw Error("manifest has no argv");
    }
    auto argv = m["argv"].get<std::vector<std::string>>();
    for (const auto& entry : m.value("inputs", json::array())) {
        const std::string path = entry.at("path").get<std::string>();
        if (entry.at("digest").is_null()) {
            continue;
        }
        const std::string digest = "fnv1a64:" + report::file_digest(path);
        if (digest != entry.at("digest").get<std::string>()) {
            throw Error("input '" + path + "' changed since the manifest was written");
        }
    }
    if (!o.out_dir.empty()) {
        for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
            if (argv[i] == "--out-dir") {
                argv[i + 1] = o.out_dir;
            }
        }
    }
    return dispatch(argv, out, err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth)
{
    CLI::App app{"EFSIS: ensemble feature selection integrating ranker stability", "efsis"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", EFSIS_VERSION);
    Options o;

    auto add_data_flags = [&](CLI::App* sub, bool many_inputs) {
        if (many_inputs) {
            sub->add_option("--input", o.inputs, "Input datasets (repeatable)")->required();
        } else {
            sub->add_option("--input", o.inputs, "Input dataset")->required()->expected(1);
        }
        sub->add_flag("--transpose", o.transpose, "Features as rows, samples as columns");
        sub->add_option("--bootstraps", o.bootstraps, "Bootstrap count M")->capture_default_str();
        sub->add_option("--seed", o.seed, "Master seed")->envname("EFSIS_SEED")->capture_default_str();
        sub->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
        sub->add_option("--weight-mode", o.weight_mode, "Stability exponent: paper (1-S) or prose (S)")
            ->check(CLI::IsMember({"paper", "prose"}))
            ->capture_default_str();
        sub->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    };

    auto* rank = app.add_subcommand("rank", "Rank features and select the top percentage");
    add_data_flags(rank, false);
    rank->add_option("--method", o.methods, "sam|infogain|geode|relieff|funcpert|efsis")
        ->required()
        ->expected(1)
        ->check(CLI::IsMember(kMethods, CLI::ignore_case));
    rank->add_option("--percent", o.percent, "Selection threshold (% of features)")->capture_default_str();
    rank->add_flag("--progress", o.progress, "Report ranker task progress on stderr");

    auto* evaluate = app.add_subcommand("evaluate", "Stratified cross-validation of one method");
    add_data_flags(evaluate, false);
    evaluate->add_option("--method", o.methods, "sam|infogain|geode|relieff|funcpert|efsis")
        ->required()
        ->expected(1)
        ->check(CLI::IsMember(kMethods, CLI::ignore_case));
    evaluate->add_option("--percent", o.percent, "Selection threshold (% of features)")->capture_default_str();
    evaluate->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();

    auto* bench = app.add_subcommand("benchmark", "Methods x percentages sweep with tables and charts");
    add_data_flags(bench, true);
    bool methods_given = false;
    bench->add_option("--method", o.methods, "Methods (comma separated or repeated)")
        ->delimiter(',')
        ->each([&](const std::string&) { methods_given = true; });
    bench->add_option("--percent-list", o.percent_list, "Percentages (comma separated)")
        ->delimiter(',');
    bench->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Write a planted-signal synthetic dataset");
    synth->add_option("--samples", o.samples)->capture_default_str();
    synth->add_option("--features", o.features)->capture_default_str();
    synth->add_option("--informative", o.informative)->capture_default_str();
    synth->add_option("--effect", o.effect)->capture_default_str();
    synth->add_option("--seed", o.seed)->envname("EFSIS_SEED")->capture_default_str();
    synth->add_option("--name", o.name, "File name stem")->capture_default_str();
    synth->add_option("--out-dir", o.out_dir)->capture_default_str();

    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("--manifest", o.manifest)->required();
    std::string replay_out;
    replay->add_option("--out-dir", replay_out, "Override the recorded output directory");

    std::vector<std::string> argv_storage{"efsis"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) {
        argv.push_back(a.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << EFSIS_VERSION << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "efsis: " << e.what() << '\n';
        return kExitUsageError;
    }

    try {
        if (*rank) return cmd_rank(o, out, err);
        if (*evaluate) return cmd_evaluate(o, out, err);
        if (*bench) {
            std::vector<std::string> methods;
            for (auto& m : o.methods) {
                if (!m.empty()) methods.push_back(lower(m));
            }
            if (methods_given && methods.empty()) {
                throw UsageError("--method list is empty");
            }
            for (const auto& m : methods) {
                if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) {
                    throw UsageError("unknown method '" + m + "'");
                }
            }
            o.methods = methods.empty() ? kMethods : methods;
            if (o.percent_list.empty()) {
                o.percent_list = kDefaultSweep;
            }
            return cmd_benchmark(o, out, err);
        }
        if (*synth) return cmd_synth(o, out);
        if (*replay) {
            o.out_dir = replay_out;
            return cmd_replay(o, out, err, depth);
        }
    } catch (const UsageError& e) {
        err << "efsis: " << e.what() << '\n';
        return kExitUsageError;
    } catch (const std::exception& e) {
        err << "efsis: " << e.what() << '\n';
        return kExitDomainError;
    }
    return kExitUsageError;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    return dispatch(args, out, err, 0);
}

} // namespace efsis::cli
