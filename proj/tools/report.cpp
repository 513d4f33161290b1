#include "report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "efsis/error.hpp"

namespace efsis::report {

std::string format_exact(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_fixed(double v, int digits)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string file_digest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "' for hashing");
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void write_ranking_csv(std::ostream& out, const RankedList& list,
                       const std::vector<std::string>& feature_names)
{
    out << "rank,feature,score\n";
    const auto order = list.order();
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t f = order[pos];
        out << pos + 1 << ',' << feature_names.at(f) << ',' << format_exact(list.scores.at(f))
            << '\n';
    }
}

void write_selected(std::ostream& out, const FeatureSubset& subset, const RankedList& list,
                    const std::vector<std::string>& feature_names)
{
    std::vector<std::size_t> members = subset.members;
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return list.ranks[a] < list.ranks[b]; });
    for (std::size_t f : members) {
        out << feature_names.at(f) << '\n';
    }
}

void write_fold_csv(std::ostream& out, const EvalReport& report)
{
    out << "fold,auc\n";
    for (std::size_t j = 0; j < report.per_fold_auc.size(); ++j) {
        out << j + 1 << ',' << format_exact(report.per_fold_auc[j]) << '\n';
    }
}

namespace {

constexpr const char* kBenchmarkHeader =
    "dataset,method,percent,mean_auc,sd_auc,stability,best,p_vs_best,significantly_worse,"
    "best_individual,p_vs_best_individual,significantly_worse_individual,note";

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error("cannot parse number '" + s + "'");
    }
    return v;
}

std::string optional_cell(const std::optional<double>& v)
{
    return v ? format_exact(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    return parse_double(s);
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

} // namespace

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows)
{
    out << kBenchmarkHeader << '\n';
    for (const auto& [dataset, r] : rows) {
        std::string note = r.note;
        std::replace(note.begin(), note.end(), ',', ';');
        out << dataset << ',' << r.method << ',' << format_exact(r.percent) << ','
            << format_exact(r.mean_auc) << ',' << format_exact(r.sd_auc) << ','
            << format_exact(r.stability) << ',' << (r.best ? 1 : 0) << ','
            << optional_cell(r.p_vs_best) << ',' << (r.significantly_worse ? 1 : 0) << ','
            << (r.best_individual ? 1 : 0) << ',' << optional_cell(r.p_vs_best_individual) << ','
            << (r.significantly_worse_than_individual ? 1 : 0) << ',' << note << '\n';
    }
}

std::vector<BenchmarkRow> read_benchmark_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kBenchmarkHeader) {
        throw Error("benchmark CSV header mismatch");
    }
    std::vector<BenchmarkRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto c = split_csv(line);
        if (c.size() != 13) {
            throw Error("benchmark CSV row has " + std::to_string(c.size()) + " cells");
        }
        BenchmarkRow b;
        b.dataset = c[0];
        b.row.method = c[1];
        b.row.percent = parse_double(c[2]);
        b.row.mean_auc = parse_double(c[3]);
        b.row.sd_auc = parse_double(c[4]);
        b.row.stability = parse_double(c[5]);
        b.row.best = c[6] == "1";
        b.row.p_vs_best = parse_optional(c[7]);
        b.row.significantly_worse = c[8] == "1";
        b.row.best_individual = c[9] == "1";
        b.row.p_vs_best_individual = parse_optional(c[10]);
        b.row.significantly_worse_than_individual = c[11] == "1";
        b.row.note = c[12];
        rows.push_back(std::move(b));
    }
    return rows;
}

void write_benchmark_table(std::ostream& out, const std::vector<BenchmarkRow>& rows)
{
    // dataset -> method (first-seen order) -> cells
    std::vector<std::string> datasets;
    std::map<std::string, std::vector<std::string>> methods;
    std::map<std::string, std::vector<double>> percents;
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> cells;
    for (const auto& [ds, r] : rows) {
        if (std::find(datasets.begin(), datasets.end(), ds) == datasets.end()) {
            datasets.push_back(ds);
        }
        auto& ms = methods[ds];
        if (std::find(ms.begin(), ms.end(), r.method) == ms.end()) {
            ms.push_back(r.method);
        }
        auto& ps = percents[ds];
        if (std::find(ps.begin(), ps.end(), r.percent) == ps.end()) {
            ps.push_back(r.percent);
        }
        std::string cell = format_fixed(r.mean_auc, 2) + "+-" + format_fixed(r.sd_auc, 2);
        if (r.best) cell += " +";
        if (r.significantly_worse) cell += " *";
        cells[{ds, r.method}].push_back(cell);
    }
    out << "mean AUC +- sd over folds; '+' best in column, '*' significantly worse than best "
           "(Wilcoxon p < 0.05)\n";
    for (const auto& ds : datasets) {
        out << '\n' << ds << '\n';
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-10s", "method");
        out << buf;
        for (double p : percents[ds]) {
            std::snprintf(buf, sizeof buf, " | %-13s", (format_fixed(p, 1) + "%").c_str());
            out << buf;
        }
        out << '\n';
        for (const auto& m : methods[ds]) {
            std::snprintf(buf, sizeof buf, "%-10s", m.c_str());
            out << buf;
            for (const auto& c : cells[{ds, m}]) {
                std::snprintf(buf, sizeof buf, " | %-13s", c.c_str());
                out << buf;
            }
            out << '\n';
        }
    }
}

void write_stability_csv(std::ostream& out, const std::vector<StabilityPoint>& points)
{
    out << "method,percent,stability\n";
    for (const auto& p : points) {
        out << p.method << ',' << format_exact(p.percent) << ',' << format_exact(p.stability)
            << '\n';
    }
}

std::vector<StabilityPoint> read_stability_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "method,percent,stability") {
        throw Error("stability CSV header mismatch");
    }
    std::vector<StabilityPoint> points;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto c = split_csv(line);
        if (c.size() != 3) {
            throw Error("stability CSV row has " + std::to_string(c.size()) + " cells");
        }
        points.push_back({c[0], parse_double(c[1]), parse_double(c[2])});
    }
    return points;
}

void write_stability_chart(std::ostream& out, const std::string& title,
                           const std::vector<StabilityPoint>& points)
{
    constexpr double width = 640, height = 420;
    constexpr double left = 60, right = 150, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::vector<std::string> series;
    double x_min = 0.0, x_max = 1.0;
    bool first = true;
    for (const auto& p : points) {
        if (std::find(series.begin(), series.end(), p.method) == series.end()) {
            series.push_back(p.method);
        }
        x_min = first ? p.percent : std::min(x_min, p.percent);
        x_max = first ? p.percent : std::max(x_max, p.percent);
        first = false;
    }
    if (x_max <= x_min) {
        x_max = x_min + 1.0;
    }
    auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) { return top + (1.0 - y) * plot_h; };

    out << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n'
        << R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width=")" << width
        << R"(" height=")" << height << R"(" font-family="sans-serif" font-size="12">)" << '\n'
        << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n'
        << R"(<text x=")" << width / 2 << R"(" y="22" text-anchor="middle" font-size="15">)"
        << escape_xml(title) << "</text>\n";
    // axes
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double y = i / 5.0;
        out << "<text x=\"" << left - 8 << "\" y=\"" << sy(y) + 4
            << "\" text-anchor=\"end\">" << format_fixed(y, 1) << "</text>\n";
    }
    std::vector<double> ticks;
    for (const auto& p : points) {
        if (std::find(ticks.begin(), ticks.end(), p.percent) == ticks.end()) {
            ticks.push_back(p.percent);
        }
    }
    for (double x : ticks) {
        std::ostringstream label;
        label << x;
        out << "<text x=\"" << sx(x) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\">" << label.str() << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\">selected features (%)</text>\n"
        << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 "
        << top + plot_h / 2 << ")\" text-anchor=\"middle\">stability</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPalette.size()];
        std::vector<std::pair<double, double>> xy;
        for (const auto& p : points) {
            if (p.method == series[s]) {
                xy.emplace_back(p.percent, p.stability);
            }
        }
        std::sort(xy.begin(), xy.end());
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < xy.size(); ++i) {
            out << (i ? " " : "") << sx(xy[i].first) << ',' << sy(xy[i].second);
        }
        out << "\"/>\n";
        for (const auto& [x, y] : xy) {
            out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\""
                << color << "\"/>\n";
        }
        const double ly = top + 10 + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << left + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w + 35 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << left + plot_w + 40 << "\" y=\"" << ly + 4 << "\">"
            << escape_xml(series[s]) << "</text>\n";
    }
    out << "</svg>\n";
}

namespace {

struct FiveNumber {
    double min, q1, median, q3, max;
};

double quantile(const std::vector<double>& sorted, double q)
{
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FiveNumber summarize(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return {v.front(), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75), v.back()};
}

} // namespace

void write_box_plot(std::ostream& out, const std::string& first_label,
                    const std::string& second_label, const std::vector<BoxGroup>& groups)
{
    constexpr double group_w = 140, height = 420, left = 60, top = 50, bottom = 60;
    const double width = left + group_w * static_cast<double>(std::max<std::size_t>(groups.size(), 1)) + 30;
    const double plot_h = height - top - bottom;
    auto sy = [&](double y) { return top + (1.0 - y) * plot_h; };

    out << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n'
        << R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width=")" << width
        << R"(" height=")" << height << R"(" font-family="sans-serif" font-size="12">)" << '\n'
        << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n'
        << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape_xml(first_label) << " vs " << escape_xml(second_label)
        << " stability</text>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double y = i / 5.0;
        out << "<text x=\"" << left - 8 << "\" y=\"" << sy(y) + 4
            << "\" text-anchor=\"end\">" << format_fixed(y, 1) << "</text>\n";
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& grp = groups[g];
        const double x0 = left + group_w * static_cast<double>(g);
        const std::array<const std::vector<double>*, 2> data{&grp.first, &grp.second};
        for (std::size_t b = 0; b < 2; ++b) {
            if (data[b]->empty()) {
                continue;
            }
            const auto s = summarize(*data[b]);
            const double cx = x0 + 40 + 60.0 * static_cast<double>(b);
            const char* color = kPalette[b];
            out << "<line x1=\"" << cx << "\" y1=\"" << sy(s.max) << "\" x2=\"" << cx
                << "\" y2=\"" << sy(s.min) << "\" stroke=\"black\"/>\n"
                << "<rect x=\"" << cx - 18 << "\" y=\"" << sy(s.q3) << "\" width=\"36\" height=\""
                << std::max(0.5, sy(s.q1) - sy(s.q3)) << "\" fill=\"" << color
                << "\" fill-opacity=\"0.6\" stroke=\"black\"/>\n"
                << "<line x1=\"" << cx - 18 << "\" y1=\"" << sy(s.median) << "\" x2=\"" << cx + 18
                << "\" y2=\"" << sy(s.median) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        }
        std::string annotation = "p=n/a";
        if (grp.p_value) {
            annotation = "p=" + format_fixed(*grp.p_value, 4);
            if (*grp.p_value < 0.005) {
                annotation += " **";
            } else if (*grp.p_value < 0.01) {
                annotation += " *";
            }
        }
        out << "<text x=\"" << x0 + 70 << "\" y=\"" << top - 8 << "\" text-anchor=\"middle\">"
            << annotation << "</text>\n"
            << "<text x=\"" << x0 + 70 << "\" y=\"" << top + plot_h + 20
            << "\" text-anchor=\"middle\">" << escape_xml(grp.dataset) << "</text>\n";
    }
    const double ly = height - 18;
    out << "<rect x=\"" << left << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\""
        << kPalette[0] << "\"/><text x=\"" << left + 16 << "\" y=\"" << ly << "\">"
        << escape_xml(first_label) << "</text>\n"
        << "<rect x=\"" << left + 110 << "\" y=\"" << ly - 10
        << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[1] << "\"/><text x=\""
        << left + 126 << "\" y=\"" << ly << "\">" << escape_xml(second_label) << "</text>\n"
        << "</svg>\n";
}

} // namespace efsis::report
