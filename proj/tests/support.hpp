#pragma once

// Helpers shared by the CLI tests and the acceptance binary.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"

namespace support {

namespace fs = std::filesystem;

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = efsis::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

inline std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
        : path_(fs::temp_directory_path() / ("efsis_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }

private:
    fs::path path_;
};

/// Minimal XML well-formedness check for the SVGs we emit: balanced,
/// properly nested elements, quoted attributes, a single <svg> root.
inline bool svg_well_formed(const std::string& text, std::string* why = nullptr)
{
    auto fail = [&](const std::string& msg) {
        if (why != nullptr) {
            *why = msg;
        }
        return false;
    };
    std::vector<std::string> stack;
    std::size_t i = 0;
    bool root_seen = false;
    while (true) {
        const auto lt = text.find('<', i);
        if (lt == std::string::npos) {
            break;
        }
        const auto gt = text.find('>', lt);
        if (gt == std::string::npos) {
            return fail("unterminated tag");
        }
        std::string tag = text.substr(lt + 1, gt - lt - 1);
        i = gt + 1;
        if (tag.starts_with("?") || tag.starts_with("!")) {
            continue;
        }
        if (tag.starts_with("/")) {
            const std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name) {
                return fail("mismatched </" + name + ">");
            }
            stack.pop_back();
            continue;
        }
        const bool self_closing = tag.ends_with("/");
        if (self_closing) {
            tag.pop_back();
        }
        const auto space = tag.find_first_of(" \n\t");
        const std::string name = tag.substr(0, space);
        if (name.empty()) {
            return fail("empty tag name");
        }
        if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) {
            return fail("unbalanced quotes in <" + name + ">");
        }
        if (stack.empty()) {
            if (root_seen || name != "svg") {
                return fail("root element must be a single <svg>");
            }
            root_seen = true;
            if (tag.find("xmlns=\"http://www.w3.org/2000/svg\"") == std::string::npos) {
                return fail("missing SVG namespace");
            }
        }
        if (!self_closing) {
            stack.push_back(name);
        }
    }
    if (!stack.empty()) {
        return fail("unclosed <" + stack.back() + ">");
    }
    if (!root_seen) {
        return fail("no <svg> element");
    }
    if (text.find('&') != std::string::npos) {
        // Only the predefined entities are allowed.
        for (auto pos = text.find('&'); pos != std::string::npos; pos = text.find('&', pos + 1)) {
            const auto rest = text.substr(pos, 6);
            if (!(rest.starts_with("&amp;") || rest.starts_with("&lt;") || rest.starts_with("&gt;")
                  || rest.starts_with("&quot;") || rest.starts_with("&apos;"))) {
                return fail("bare ampersand");
            }
        }
    }
    return true;
}

/// Every file in `dir` except the manifest.
inline std::vector<std::string> output_files(const fs::path& dir)
{
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().filename() != "manifest.json") {
            names.push_back(e.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

} // namespace support
